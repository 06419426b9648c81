// UI state lives entirely in the URL query string so every view is
// shareable and the back button just works.

export const TABS = ['reviews', 'guidelines', 'studies'] as const;
export type Tab = (typeof TABS)[number];

export interface UiState {
  query: string;
  tab: Tab;
  page: number;
}

export const DEFAULT_STATE: UiState = { query: '', tab: 'reviews', page: 1 };

function asTab(value: string | null): Tab {
  return (TABS as readonly string[]).includes(value ?? '') ? (value as Tab) : 'reviews';
}

function asPage(value: string | null): number {
  const page = Number(value);
  return Number.isInteger(page) && page >= 1 ? page : 1;
}

export function parseState(search: string): UiState {
  const params = new URLSearchParams(search);
  return {
    query: params.get('q') ?? '',
    tab: asTab(params.get('tab')),
    page: asPage(params.get('page')),
  };
}

export function encodeState(state: UiState): string {
  const params = new URLSearchParams();
  params.set('q', state.query);
  params.set('tab', state.tab);
  params.set('page', String(state.page));
  return `?${params.toString()}`;
}

export function withQuery(state: UiState, query: string): UiState {
  return { query, tab: state.tab, page: 1 };
}

export function withTab(state: UiState, tab: Tab): UiState {
  return { query: state.query, tab, page: 1 };
}

export function withPage(state: UiState, page: number): UiState {
  return { query: state.query, tab: state.tab, page };
}
