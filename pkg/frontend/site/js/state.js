// UI state lives entirely in the URL query string so every view is
// shareable and the back button just works.
export const TABS = ['reviews', 'guidelines', 'studies'];
export const DEFAULT_STATE = { query: '', tab: 'reviews', page: 1 };
function asTab(value) {
    return TABS.includes(value ?? '') ? value : 'reviews';
}
function asPage(value) {
    const page = Number(value);
    return Number.isInteger(page) && page >= 1 ? page : 1;
}
export function parseState(search) {
    const params = new URLSearchParams(search);
    return {
        query: params.get('q') ?? '',
        tab: asTab(params.get('tab')),
        page: asPage(params.get('page')),
    };
}
export function encodeState(state) {
    const params = new URLSearchParams();
    params.set('q', state.query);
    params.set('tab', state.tab);
    params.set('page', String(state.page));
    return `?${params.toString()}`;
}
export function withQuery(state, query) {
    return { query, tab: state.tab, page: 1 };
}
export function withTab(state, tab) {
    return { query: state.query, tab, page: 1 };
}
export function withPage(state, page) {
    return { query: state.query, tab: state.tab, page };
}
