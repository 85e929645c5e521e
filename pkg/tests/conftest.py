from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from simplemt.lexicon import load_lexicon

REPO_ROOT = Path(__file__).parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def paper_lexicon_path() -> Path:
    return FIXTURES / "aoa_paper.csv"


@pytest.fixture(scope="session")
def paper_lexicon(paper_lexicon_path):
    return load_lexicon(paper_lexicon_path)


@pytest.fixture(scope="session")
def familiar_words_path() -> Path:
    return FIXTURES / "familiar_words.txt"
