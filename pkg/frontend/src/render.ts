import type { SearchPayload, SearchResult } from './types.js';
import type { Tab } from './state.js';
import { TABS } from './state.js';

const SNIPPET_BUDGET = 280;

const TAB_LABELS: Record<Tab, string> = {
  reviews: 'Reviews',
  guidelines: 'Guidelines',
  studies: 'Studies',
};

function snippetElement(abstract: string): HTMLElement {
  const wrap = document.createElement('div');
  wrap.className = 'snippet';
  const text = document.createElement('span');
  wrap.appendChild(text);
  if (abstract.length <= SNIPPET_BUDGET) {
    text.textContent = abstract;
    return wrap;
  }
  let expanded = false;
  const toggle = document.createElement('button');
  toggle.type = 'button';
  toggle.className = 'snippet-toggle';
  const update = () => {
    text.textContent = expanded ? abstract : `${abstract.slice(0, SNIPPET_BUDGET)}…`;
    toggle.textContent = expanded ? 'less' : 'more';
  };
  toggle.addEventListener('click', () => {
    expanded = !expanded;
    update();
  });
  update();
  wrap.appendChild(toggle);
  return wrap;
}

function resultElement(result: SearchResult): HTMLLIElement {
  const item = document.createElement('li');
  item.className = 'result';
  item.dataset.pmid = String(result.pmid);

  const title = document.createElement('h3');
  title.className = 'result-title';
  title.textContent = result.title;
  item.appendChild(title);

  const meta = document.createElement('p');
  meta.className = 'result-meta';
  const authors = result.authors.join(', ');
  meta.textContent = authors
    ? `${authors} · ${result.journal} · ${result.year}`
    : `${result.journal} · ${result.year}`;
  item.appendChild(meta);

  if (result.abstract) {
    item.appendChild(snippetElement(result.abstract));
  }
  return item;
}

export function renderResults(list: HTMLElement, payload: SearchPayload): void {
  list.replaceChildren(...payload.results.map(resultElement));
}

export function renderEmptyMessage(list: HTMLElement): void {
  const item = document.createElement('li');
  item.className = 'no-results';
  item.textContent = 'No results.';
  list.replaceChildren(item);
}

export function renderTabs(
  nav: HTMLElement,
  active: Tab,
  onSelect: (tab: Tab) => void,
): void {
  nav.replaceChildren(
    ...TABS.map((tab) => {
      const button = document.createElement('button');
      button.type = 'button';
      button.className = tab === active ? 'tab active' : 'tab';
      button.dataset.tab = tab;
      button.setAttribute('aria-selected', String(tab === active));
      button.textContent = TAB_LABELS[tab];
      button.addEventListener('click', () => onSelect(tab));
      return button;
    }),
  );
}

export function renderPager(
  pager: HTMLElement,
  payload: SearchPayload,
  onPage: (page: number) => void,
): void {
  const pages = Math.max(1, Math.ceil(payload.total / payload.page_size));
  const makeButton = (label: string, page: number, disabled: boolean) => {
    const button = document.createElement('button');
    button.type = 'button';
    button.textContent = label;
    button.disabled = disabled;
    button.addEventListener('click', () => onPage(page));
    return button;
  };
  const info = document.createElement('span');
  info.className = 'pager-info';
  info.textContent = `Page ${payload.page} of ${pages} (${payload.total} results)`;
  pager.replaceChildren(
    makeButton('‹ prev', payload.page - 1, payload.page <= 1),
    info,
    makeButton('next ›', payload.page + 1, payload.page >= pages),
  );
  pager.hidden = payload.total === 0;
}

export function showBanner(banner: HTMLElement, message: string): void {
  banner.textContent = message;
  banner.hidden = false;
}

export function clearBanner(banner: HTMLElement): void {
  banner.textContent = '';
  banner.hidden = true;
}
