"""Synthetic corpus generation.

Two generators live here. generate_planted_docs draws documents from a
known topic mixture (Poisson lengths, Dirichlet doc-topic weights,
uniform word choice within each planted vocabulary) and backs the
recovery tests. generate_project emits a runnable micro-project (trace
files, manifest, facts) in the documented formats; it stands in for
instrumenting a live program.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ConfigError
from .facts import ClassFact, FactsStore, MethodFact, write_facts
from .traces import ManifestEntry, method_key, write_manifest


def poisson(rng: random.Random, mean: float) -> int:
    """Knuth's product-of-uniforms sampler."""
    if mean <= 0:
        raise ConfigError("poisson mean must be > 0")
    limit = math.exp(-mean)
    k = 0
    p = 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def dirichlet(rng: random.Random, alphas: Sequence[float]) -> list[float]:
    draws = [rng.gammavariate(a, 1.0) for a in alphas]
    total = sum(draws)
    return [d / total for d in draws]


@dataclass(frozen=True)
class PlantedSpec:
    """Generator parameters for the planted-topic corpus."""

    vocabularies: tuple[tuple[str, ...], ...]
    num_docs: int = 40
    mean_length: float = 60.0
    doc_alpha: float = 0.1


def generate_planted_docs(
    spec: PlantedSpec, seed: int
) -> tuple[list[dict[str, int]], tuple[str, ...]]:
    """Documents as term->count maps, plus the combined vocabulary."""
    rng = random.Random(seed)
    terms = tuple(sorted({t for vocab in spec.vocabularies for t in vocab}))
    k = len(spec.vocabularies)
    docs = []
    for _ in range(spec.num_docs):
        n = 0
        while n == 0:
            n = poisson(rng, spec.mean_length)
        mix = dirichlet(rng, [spec.doc_alpha] * k)
        row: Counter = Counter()
        for _ in range(n):
            u = rng.random()
            acc = 0.0
            topic = k - 1
            for i, w in enumerate(mix):
                acc += w
                if u < acc:
                    topic = i
                    break
            row[rng.choice(spec.vocabularies[topic])] += 1
        docs.append(dict(row))
    return docs, terms


@dataclass(frozen=True)
class FeatureSpec:
    """One synthetic feature: a named vocabulary spread over classes."""

    name: str
    class_names: tuple[str, ...]
    verbs: tuple[str, ...]
    nouns: tuple[str, ...]


DEFAULT_FEATURES = (
    FeatureSpec(
        name="draw",
        class_names=("RectangleFigure", "EllipseFigure"),
        verbs=("draw", "fill", "paint"),
        nouns=("Rectangle", "Ellipse", "Outline"),
    ),
    FeatureSpec(
        name="undo",
        class_names=("UndoManager", "CommandHistory"),
        verbs=("undo", "redo", "revert"),
        nouns=("Change", "Command", "Activity"),
    ),
    FeatureSpec(
        name="persist",
        class_names=("DrawingStore", "FileExporter"),
        verbs=("save", "load", "export"),
        nouns=("File", "Drawing", "Stream"),
    ),
)


@dataclass(frozen=True)
class ProjectSpec:
    features: tuple[FeatureSpec, ...] = DEFAULT_FEATURES
    traces_per_feature: int = 2
    calls_per_trace: int = 12
    utility_class: str = "Logger"
    utility_method: str = "log"
    noise_rate: float = 0.15


def _feature_methods(feature: FeatureSpec) -> list[tuple[str, str, str]]:
    out = []
    for i, cls in enumerate(feature.class_names):
        for j, verb in enumerate(feature.verbs):
            noun = feature.nouns[(i + j) % len(feature.nouns)]
            out.append((cls, f"{verb}{noun}", "()"))
    return out


def generate_project(
    out_dir: str | Path, seed: int = 0, spec: ProjectSpec = ProjectSpec()
) -> Path:
    """Write trace files, a manifest, and a facts file under out_dir.

    Each feature gets its own use case whose traces call mostly that
    feature's methods, a sprinkle of other features' methods as noise,
    and the omnipresent utility method in every trace.

    Returns the manifest path.
    """
    rng = random.Random(seed)
    out_dir = Path(out_dir)
    traces_dir = out_dir / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)

    store = FactsStore()
    store.add_class(
        ClassFact(spec.utility_class, "Object", (), ("level", "sink"))
    )
    util_key = method_key(spec.utility_class, spec.utility_method, "(String)")
    store.add_method(
        MethodFact(
            method_key=util_key,
            class_name=spec.utility_class,
            method_name=spec.utility_method,
            signature="(String)",
            arguments=("String message",),
            return_type="void",
            return_value=None,
            comment_terms=tuple("append one message to the shared log".split()),
        )
    )
    methods_by_feature = {}
    for feature in spec.features:
        keys = []
        for cls, name, sig in _feature_methods(feature):
            if cls not in store.classes:
                store.add_class(ClassFact(cls, "Object", (), ()))
            key = method_key(cls, name, sig)
            comment = f"{feature.name} support: {name}"
            store.add_method(
                MethodFact(
                    method_key=key,
                    class_name=cls,
                    method_name=name,
                    signature=sig,
                    arguments=(),
                    return_type="void",
                    return_value=None,
                    comment_terms=tuple(comment.split()),
                )
            )
            keys.append(key)
        methods_by_feature[feature.name] = keys

    entries = []
    for feature in spec.features:
        own = methods_by_feature[feature.name]
        other = [
            k
            for f in spec.features
            if f.name != feature.name
            for k in methods_by_feature[f.name]
        ]
        for i in range(spec.traces_per_feature):
            trace_id = f"{feature.name}_{i}"
            lines = [f"# synthetic scenario for {feature.name}"]
            lines.append(f"M 1 {util_key}")
            for _ in range(spec.calls_per_trace):
                pool = other if other and rng.random() < spec.noise_rate else own
                lines.append(f"M 1 {rng.choice(pool)}")
            path = traces_dir / f"{trace_id}.trace"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            # manifest paths are resolved relative to the manifest file, so
            # the project directory stays relocatable
            entries.append(
                ManifestEntry(trace_id, feature.name, f"traces/{trace_id}.trace")
            )

    manifest_path = out_dir / "manifest.tsv"
    write_manifest(entries, manifest_path)
    write_facts(store, out_dir / "facts.tsv")
    return manifest_path
