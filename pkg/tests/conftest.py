import json
import sys

import pytest

from tweetpp.corpus import Dataset, LabelVector, Tweet
from tweetpp.synthetic import generate_corpus


def lv(text):
    return LabelVector.parse(text)


@pytest.fixture
def tiny_dataset():
    rows = [
        ("t1", "Should bring the death penalty back! #executed", "express_emotion", "pro"),
        ("t2", "The death penalty is pure violence, a barbaric and useless violence.", "express_emotion", "con"),
        ("t3", "RT @news death penalty study released http://t.co/x", "information_sharing", "neutral"),
        ("t4", "@sam what do you think about the death penalty?", "social_interaction", "neutral"),
        ("t5", "death penalty repeal vote today http://t.co/y #news", "information_sharing", "con"),
        ("t6", "@kim the death penalty should stay, agree?", "social_interaction", "pro"),
    ]
    return Dataset(
        tuple(Tweet(i, text, LabelVector.from_names(p, q)) for i, text, p, q in rows)
    )


@pytest.fixture(scope="session")
def synthetic_corpus():
    return generate_corpus(300, seed=11)


@pytest.fixture
def write_jsonl(tmp_path):
    def _write(records, name="data.jsonl"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(r if isinstance(r, str) else json.dumps(r))
                fh.write("\n")
        return path

    return _write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
