"""Publication of the wire contract as JSON schema files.

`python -m honvis.service.schemas DIR` regenerates one schema file per
response (and the session-create request); the test suite asserts the files
shipped under docs/schemas match what the models produce.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from . import models

SCHEMAS: dict[str, type[models.StrictModel]] = {
    "error": models.ErrorBody,
    "summary": models.SummaryResponse,
    "ports": models.PortListResponse,
    "port_detail": models.PortDetailResponse,
    "dependency": models.DependencyResponse,
    "pagerank": models.PagerankResponse,
    "communities": models.CommunitiesResponse,
    "layout": models.LayoutResponse,
    "aggregation": models.AggregationResponse,
    "session_create": models.SessionCreateRequest,
    "session": models.SessionStateResponse,
    "step_report": models.StepReportResponse,
    "delete": models.DeleteResponse,
    "histogram": models.HistogramResponse,
}


def schema_text(model: type[models.StrictModel]) -> str:
    return json.dumps(model.model_json_schema(), indent=2, sort_keys=True) + "\n"


def write_schemas(directory: str | Path) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, model in sorted(SCHEMAS.items()):
        path = out / f"{name}.schema.json"
        path.write_text(schema_text(model), encoding="utf-8")
        written.append(path)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "docs/schemas"
    for p in write_schemas(target):
        print(p)
