export class ApiError extends Error {
    constructor(message, status) {
        super(message);
        this.status = status;
        this.name = 'ApiError';
    }
}
export async function fetchResults(state, fetchImpl) {
    const params = new URLSearchParams({
        q: state.query,
        tab: state.tab,
        page: String(state.page),
    });
    const response = await fetchImpl(`/api/search?${params.toString()}`);
    if (!response.ok) {
        let message = `request failed (${response.status})`;
        try {
            const body = (await response.json());
            if (body.error)
                message = body.error;
        }
        catch {
            // non-JSON error body; keep the generic message
        }
        throw new ApiError(message, response.status);
    }
    return (await response.json());
}
