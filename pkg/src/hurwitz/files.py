"""Group-spec files and selector resolution.

A group file is JSON with either an explicit multiplication table or
permutation generators, plus optional named conjugation-invariant subsets and
named elements:

    {"degree": 4, "permutation_generators": [[1,0,2,3],[1,2,3,0]],
     "subsets": {"transpositions": {"class_of": "(1,2)"}},
     "elements": {"long_cycle": "(1,2,3,4)"}}

Selectors for Q and omega accept named entries from the file, element labels
(cycle notation for permutation groups; commas optional), or plain indices.
"""

from __future__ import annotations

import importlib.resources
import json
import re

from .errors import InvalidInputError
from .groups import FiniteGroup, load_group, validate_Q

BUNDLED = ("z2", "s3", "s4", "s5", "d3", "d5")


def load_group_file(path):
    """Load a group file; bare names like 's3' resolve to the bundled files."""
    if re.fullmatch(r"[a-z0-9_]+", str(path)) and str(path) in BUNDLED:
        ref = importlib.resources.files("hurwitz.data").joinpath(path + ".json")
        data = json.loads(ref.read_text())
    else:
        with open(path) as fh:
            data = json.load(fh)
    group = load_group(data)
    return group, data


def _normalize_cycles(s):
    # "(123)" and "(1,2,3)" both name the same permutation label
    return re.sub(r"[\s,]", "", s)


def resolve_element(G: FiniteGroup, data, selector):
    """Resolve an element selector: named element, label, or index."""
    if isinstance(selector, int):
        if not 0 <= selector < G.order:
            raise InvalidInputError(f"element index {selector} out of range")
        return selector
    named = (data or {}).get("elements", {})
    if selector in named:
        selector = named[selector]
    if isinstance(selector, int):
        return resolve_element(G, None, selector)
    if G.labels is not None:
        want = _normalize_cycles(selector)
        for i, lab in enumerate(G.labels):
            if _normalize_cycles(lab) == want:
                return i
    if re.fullmatch(r"\d+", str(selector)):
        return resolve_element(G, None, int(selector))
    raise InvalidInputError(f"cannot resolve element selector {selector!r}")


def resolve_Q(G: FiniteGroup, data, selector):
    """Resolve a Q selector into a validated InvariantSubset."""
    named = (data or {}).get("subsets", {})
    if isinstance(selector, str) and selector in named:
        selector = named[selector]
    if isinstance(selector, dict):
        if "class_of" not in selector:
            raise InvalidInputError(f"bad subset spec {selector!r}")
        a = resolve_element(G, data, selector["class_of"])
        members = sorted({G.conj(a, g) for g in range(G.order)})
        return validate_Q(G, members)
    if isinstance(selector, str):
        parts = [p for p in re.split(r"[;+]", selector) if p]
        members = [resolve_element(G, data, p) for p in parts]
        return validate_Q(G, members)
    members = [resolve_element(G, data, p) for p in selector]
    return validate_Q(G, members)
