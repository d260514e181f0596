from __future__ import annotations

import pytest

from nlcmd.config import EngineConfig, data_path, default_config
from nlcmd.learner import Thesaurus
from nlcmd.session import EngineRuntime, Session

GOLDEN_SENTENCE = (
    'replace "apple" with "peach" in lines 1 - 10 that contain "orange" and "bread"'
)

GOLDEN_FRAME = {
    "action": 1011,
    "primary": {"kind": "quotation", "index": 5000, "text": "apple"},
    "secondary": {"kind": "quotation", "index": 5001, "text": "peach"},
    "conditions": [
        {
            "prep": 3002,
            "indices": [3002, 6000, 2015],
            "numformat": {"kind": "range", "values": [1, 10], "frame": "absolute"},
        },
        {
            "prep": 3005,
            "indices": [3005, 5002, 5003],
            "quotes": ["orange", "bread"],
        },
    ],
}

CANONICAL_ORDER = [1011, 3002, 6000, 2015, 3005, 5002, 5003, 5000, 3004, 5001]

# Paired commands for the cross-language checks: same indices, different
# surfaces, the toy lexicon written without whitespace.
CROSS_LANGUAGE_PAIRS = [
    (
        GOLDEN_SENTENCE,
        "替换“apple”为“peach”在1-10行那包含“orange”和“bread”",
    ),
    ("delete carriage returns in each line", "删除回车符在每行"),
    ("transform numbers in lines 1 - 3 to subscript", "转换数字在1-3行至下标"),
    ("make an outline of the last 2 paragraphs", "制作大纲关于最后2段落"),
    ('replace "a" with "b" in lines 2 - 4', "替换“a”为“b”在2-4行"),
]

EN_CORPUS = [pair[0] for pair in CROSS_LANGUAGE_PAIRS] + [
    "transform numbers in lines 1 - 3 to inferior characters",
    "delete carriage returns in lines 2 - 5",
]


@pytest.fixture(scope="session")
def config() -> EngineConfig:
    return default_config()


@pytest.fixture(scope="session")
def en_lexicon(config):
    return config.lexicon_for("en")


@pytest.fixture(scope="session")
def zh_lexicon(config):
    return config.lexicon_for("zh-toy")


@pytest.fixture(scope="session")
def thesaurus() -> Thesaurus:
    return Thesaurus.load(data_path("thesaurus.json"))


@pytest.fixture()
def runtime(config) -> EngineRuntime:
    return EngineRuntime(config=config)


@pytest.fixture()
def session(runtime) -> Session:
    return Session(runtime)


@pytest.fixture()
def make_session(runtime):
    def factory(**kwargs) -> Session:
        return Session(runtime, **kwargs)

    return factory
