import { ApiError, fetchResults } from './api.js';
import { DEFAULT_STATE, encodeState, parseState, withPage, withQuery, withTab, } from './state.js';
import { clearBanner, renderEmptyMessage, renderPager, renderResults, renderTabs, showBanner, } from './render.js';
function grab(root) {
    const byId = (id) => {
        const el = root.getElementById(id);
        if (!el)
            throw new Error(`missing #${id}`);
        return el;
    };
    return {
        form: byId('search-form'),
        input: byId('search-input'),
        validation: byId('validation'),
        tabs: byId('tabs'),
        banner: byId('banner'),
        status: byId('status'),
        results: byId('results'),
        pager: byId('pager'),
    };
}
export class SearchApp {
    constructor(root, fetchImpl, win) {
        this.state = DEFAULT_STATE;
        this.requestSeq = 0;
        this.el = grab(root);
        this.win = win ?? window;
        this.fetchImpl = fetchImpl ?? ((input) => this.win.fetch(input));
    }
    init() {
        this.el.form.addEventListener('submit', (event) => {
            event.preventDefault();
            this.submit(this.el.input.value);
        });
        this.win.addEventListener('popstate', () => {
            this.restoreFromUrl({ fetch: true });
        });
        this.restoreFromUrl({ fetch: true });
    }
    get currentState() {
        return this.state;
    }
    submit(query) {
        const trimmed = query.trim();
        if (!trimmed) {
            this.el.validation.textContent = 'Enter a search term.';
            this.el.validation.hidden = false;
            return;
        }
        this.el.validation.hidden = true;
        this.navigate(withQuery(this.state, trimmed));
    }
    selectTab(tab) {
        if (!this.state.query)
            return;
        this.navigate(withTab(this.state, tab));
    }
    goToPage(page) {
        if (page < 1 || !this.state.query)
            return;
        this.navigate(withPage(this.state, page));
    }
    restoreFromUrl(options) {
        this.state = parseState(this.win.location.search);
        this.el.input.value = this.state.query;
        this.syncChrome();
        if (options.fetch && this.state.query) {
            void this.load(this.state);
        }
    }
    navigate(next) {
        this.state = next;
        this.win.history.pushState(null, '', encodeState(next));
        this.syncChrome();
        void this.load(next);
    }
    syncChrome() {
        renderTabs(this.el.tabs, this.state.tab, (tab) => this.selectTab(tab));
    }
    async load(state) {
        const seq = ++this.requestSeq;
        this.el.status.hidden = false;
        try {
            const payload = await fetchResults(state, this.fetchImpl);
            if (seq !== this.requestSeq)
                return; // superseded by a newer request
            clearBanner(this.el.banner);
            if (payload.results.length === 0) {
                renderEmptyMessage(this.el.results);
            }
            else {
                renderResults(this.el.results, payload);
            }
            renderPager(this.el.pager, payload, (page) => this.goToPage(page));
        }
        catch (error) {
            if (seq !== this.requestSeq)
                return;
            const message = error instanceof ApiError ? error.message : 'Search service unreachable.';
            showBanner(this.el.banner, message); // previous results stay on screen
        }
        finally {
            if (seq === this.requestSeq) {
                this.el.status.hidden = true;
            }
        }
    }
}
