"""Site files and single-instance JSON dumps"""
import csv
import logging
from pathlib import Path
from typing import Optional

from pydantic import BaseModel

from .diagram import MWVDiagram
from .errors import ModelSpecError, ReportError
from .geometry import Point
from .overlay import OverlayArrangement
from .schemas import (
    ComplexityDump,
    CountsDump,
    DiagramDump,
    OverlayDump,
    OverlayEdgeDump,
    OverlayFaceDump,
    OverlayVertexDump,
    VertexDump,
)

logger = logging.getLogger(__name__)


def load_site_file(path: str | Path) -> tuple[list[Point], Optional[list[float]]]:
    """Read a CSV with header x,y or x,y,weight"""
    try:
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
    except OSError as e:
        raise ModelSpecError(f"cannot read site file {path}: {e}") from None
    if not rows:
        raise ModelSpecError(f"site file {path} has no sites")
    header = set(rows[0])
    if not {"x", "y"} <= header:
        raise ModelSpecError(f"site file {path} needs columns x,y[,weight]")
    try:
        locations = [Point(float(r["x"]), float(r["y"])) for r in rows]
        weights = [float(r["weight"]) for r in rows] if "weight" in header else None
    except (TypeError, ValueError) as e:
        raise ModelSpecError(f"bad value in site file {path}: {e}") from None
    logger.info("loaded %d sites from %s", len(locations), path)
    return locations, weights


def diagram_dump(D: MWVDiagram, seed: int, model: str) -> DiagramDump:
    return DiagramDump(
        n=len(D.cell_nonempty),
        seed=seed,
        model=model,
        provenance=D.provenance,
        vertices=[VertexDump(x=v.location.x, y=v.location.y, triple=list(v.triple)) for v in D.vertices],
        counts=CountsDump(V=D.counts.V, E=D.counts.E, F=D.counts.F),
    )


def overlay_dump(A: OverlayArrangement, seed: int, model: str) -> OverlayDump:
    b = A.box
    c = A.complexity
    return OverlayDump(
        n=len(A.ordering),
        seed=seed,
        model=model,
        box=[b.xmin, b.ymin, b.xmax, b.ymax],
        vertices=[OverlayVertexDump(x=p.x, y=p.y, frame=f) for p, f in zip(A.vertices, A.vertex_on_frame)],
        edges=[OverlayEdgeDump(u=u, v=v, frame=f) for (u, v), f in zip(A.edges, A.edge_on_frame)],
        faces=[OverlayFaceDump(id=f.id, representative=[f.representative.x, f.representative.y],
                               candidates=list(f.candidates.ranks)) for f in A.faces],
        complexity=ComplexityDump(V=c.V, E=c.E, F=c.F, total=c.total),
    )


def write_json(model: BaseModel, path: Optional[str | Path]) -> str:
    """Serialize to path, or just return the text when path is None"""
    text = model.model_dump_json(indent=2) + "\n"
    if path is not None:
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            Path(path).write_text(text)
        except OSError as e:
            raise ReportError(f"cannot write {path}: {e}") from None
        logger.info("wrote %s", path)
    return text
