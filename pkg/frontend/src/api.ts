import type { SearchPayload } from './types.js';
import type { UiState } from './state.js';

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export type FetchLike = (input: string) => Promise<Response>;

export async function fetchResults(
  state: UiState,
  fetchImpl: FetchLike,
): Promise<SearchPayload> {
  const params = new URLSearchParams({
    q: state.query,
    tab: state.tab,
    page: String(state.page),
  });
  const response = await fetchImpl(`/api/search?${params.toString()}`);
  if (!response.ok) {
    let message = `request failed (${response.status})`;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) message = body.error;
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(message, response.status);
  }
  return (await response.json()) as SearchPayload;
}
