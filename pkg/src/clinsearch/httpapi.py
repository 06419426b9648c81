"""HTTP JSON API over the search engine.

GET /api/search?q=<text>&tab=<reviews|guidelines|studies>&page=<n>
GET /api/health

Errors are `{"error": <message>}` with a 4xx status. When a web UI
directory is configured it is served at the root path.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .ranking import Category
from .service import EmptyQueryError, SearchEngine, SearchRequest

_VALID_TABS = ", ".join(c.value for c in Category)


def create_app(engine: SearchEngine, webui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="clinsearch", docs_url=None, redoc_url=None)

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    @app.exception_handler(RequestValidationError)
    async def malformed_params(request: Request, exc: RequestValidationError):
        return error(400, f"malformed request parameters: {exc.errors()[0]['loc'][-1]}")

    @app.get("/api/search")
    def search(q: str = "", tab: str = Category.REVIEWS.value, page: int = 1):
        try:
            category = Category(tab.lower())
        except ValueError:
            return error(400, f"unknown tab {tab!r}; valid tabs: {_VALID_TABS}")
        if page < 1:
            return error(400, f"page must be >= 1, got {page}")
        try:
            response = engine.execute_search(
                SearchRequest(query=q, category=category, page=page)
            )
        except EmptyQueryError as exc:
            return error(400, str(exc))
        return response.to_payload()

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "index_version": engine.snapshot.version,
            "doc_count": engine.snapshot.doc_count,
        }

    if webui_dir is not None:
        app.mount("/", StaticFiles(directory=webui_dir, html=True), name="webui")
    return app
