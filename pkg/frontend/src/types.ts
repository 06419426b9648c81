export interface SearchResult {
  pmid: number;
  title: string;
  abstract: string;
  authors: string[];
  journal: string;
  year: number;
  score: number;
}

export interface SearchPayload {
  total: number;
  page: number;
  page_size: number;
  results: SearchResult[];
}
