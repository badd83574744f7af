import random
from itertools import combinations

import pytest

from mlorder.core import Sentence, SentenceType, Structure


def make_sentence(words, sid="s1", stype=SentenceType.DECLARATIVE,
                  structure=Structure.SVO, triplet="t1"):
    return Sentence(
        id=sid,
        text=" ".join(words),
        words=tuple(words),
        sentence_type=stype,
        structure=structure,
        triplet_id=triplet,
    )


def write_table_file(path, n, seed=42):
    """Complete table-scorer fixture covering every state of an n-word lattice."""
    rng = random.Random(seed)
    lines = ["# generated table fixture"]
    for size in range(n):
        for filled in combinations(range(n), size):
            spec = ",".join(str(p) for p in filled) if filled else "none"
            for k in range(n):
                if k not in filled:
                    lines.append(f"masked:{spec},target:{k},p:{rng.uniform(0.05, 0.95):.6f}")
    for k in range(n):
        lines.append(f"causal,target:{k},p:{rng.uniform(0.05, 0.95):.6f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def la_casa_azul():
    return make_sentence(["la", "casa", "azul"])
