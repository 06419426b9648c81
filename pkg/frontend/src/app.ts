import { ApiError, fetchResults, type FetchLike } from './api.js';
import {
  DEFAULT_STATE,
  encodeState,
  parseState,
  withPage,
  withQuery,
  withTab,
  type Tab,
  type UiState,
} from './state.js';
import {
  clearBanner,
  renderEmptyMessage,
  renderPager,
  renderResults,
  renderTabs,
  showBanner,
} from './render.js';

interface AppElements {
  form: HTMLFormElement;
  input: HTMLInputElement;
  validation: HTMLElement;
  tabs: HTMLElement;
  banner: HTMLElement;
  status: HTMLElement;
  results: HTMLElement;
  pager: HTMLElement;
}

function grab(root: Document): AppElements {
  const byId = (id: string) => {
    const el = root.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  return {
    form: byId('search-form') as HTMLFormElement,
    input: byId('search-input') as HTMLInputElement,
    validation: byId('validation'),
    tabs: byId('tabs'),
    banner: byId('banner'),
    status: byId('status'),
    results: byId('results'),
    pager: byId('pager'),
  };
}

export class SearchApp {
  private state: UiState = DEFAULT_STATE;
  private requestSeq = 0;
  private readonly el: AppElements;
  private readonly fetchImpl: FetchLike;
  private readonly win: Window;

  constructor(root: Document, fetchImpl?: FetchLike, win?: Window) {
    this.el = grab(root);
    this.win = win ?? window;
    this.fetchImpl = fetchImpl ?? ((input) => this.win.fetch(input));
  }

  init(): void {
    this.el.form.addEventListener('submit', (event) => {
      event.preventDefault();
      this.submit(this.el.input.value);
    });
    this.win.addEventListener('popstate', () => {
      this.restoreFromUrl({ fetch: true });
    });
    this.restoreFromUrl({ fetch: true });
  }

  get currentState(): UiState {
    return this.state;
  }

  submit(query: string): void {
    const trimmed = query.trim();
    if (!trimmed) {
      this.el.validation.textContent = 'Enter a search term.';
      this.el.validation.hidden = false;
      return;
    }
    this.el.validation.hidden = true;
    this.navigate(withQuery(this.state, trimmed));
  }

  selectTab(tab: Tab): void {
    if (!this.state.query) return;
    this.navigate(withTab(this.state, tab));
  }

  goToPage(page: number): void {
    if (page < 1 || !this.state.query) return;
    this.navigate(withPage(this.state, page));
  }

  private restoreFromUrl(options: { fetch: boolean }): void {
    this.state = parseState(this.win.location.search);
    this.el.input.value = this.state.query;
    this.syncChrome();
    if (options.fetch && this.state.query) {
      void this.load(this.state);
    }
  }

  private navigate(next: UiState): void {
    this.state = next;
    this.win.history.pushState(null, '', encodeState(next));
    this.syncChrome();
    void this.load(next);
  }

  private syncChrome(): void {
    renderTabs(this.el.tabs, this.state.tab, (tab) => this.selectTab(tab));
  }

  private async load(state: UiState): Promise<void> {
    const seq = ++this.requestSeq;
    this.el.status.hidden = false;
    try {
      const payload = await fetchResults(state, this.fetchImpl);
      if (seq !== this.requestSeq) return; // superseded by a newer request
      clearBanner(this.el.banner);
      if (payload.results.length === 0) {
        renderEmptyMessage(this.el.results);
      } else {
        renderResults(this.el.results, payload);
      }
      renderPager(this.el.pager, payload, (page) => this.goToPage(page));
    } catch (error) {
      if (seq !== this.requestSeq) return;
      const message =
        error instanceof ApiError ? error.message : 'Search service unreachable.';
      showBanner(this.el.banner, message); // previous results stay on screen
    } finally {
      if (seq === this.requestSeq) {
        this.el.status.hidden = true;
      }
    }
  }
}
