# Copyright 2026 The LingMess-cpp Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Python interface to the LingMess coreference library."""

import json
from typing import Callable, Iterable, Optional

try:
    from . import _lingmess
except ImportError:  # build tree: the extension sits beside the package
    import _lingmess

CheckpointError = _lingmess.CheckpointError
ParseError = _lingmess.ParseError
SynthError = _lingmess.SynthError
TrainingDiverged = _lingmess.TrainingDiverged
ValidationError = _lingmess.ValidationError
categorize = _lingmess.categorize
permutation_test = _lingmess.permutation_test
_Model = _lingmess.Model

__all__ = [
    "CheckpointError",
    "Model",
    "ParseError",
    "SynthError",
    "TrainingDiverged",
    "ValidationError",
    "categorize",
    "default_config",
    "dumps_jsonl",
    "evaluate",
    "gradcheck",
    "load_model",
    "loads_jsonl",
    "permutation_test",
    "per_doc_conll_f1",
    "read_corpus",
    "synth",
    "tables",
    "train",
]


def dumps_jsonl(docs: Iterable[dict]) -> str:
    return "".join(json.dumps(d) + "\n" for d in docs)


def loads_jsonl(text: str) -> list:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _as_text(docs) -> str:
    return docs if isinstance(docs, str) else dumps_jsonl(docs)


def tables() -> dict:
    return json.loads(_lingmess.tables_json())


def synth(n_docs: int = 20, seed: int = 0, heldout_names: bool = False,
          ambiguous_episodes: int = 0) -> list:
    return loads_jsonl(_lingmess.synth(n_docs, seed, heldout_names, ambiguous_episodes))


def read_corpus(path: str) -> list:
    """Reads JSONL or CoNLL-2012 into validated document dicts."""
    return loads_jsonl(_lingmess.read_corpus(path))


def default_config() -> dict:
    return json.loads(_lingmess.default_config_json())


class Model:
    """A trained model. Wraps the extension object."""

    def __init__(self, impl: _Model):
        self._impl = impl

    @property
    def config(self) -> dict:
        return json.loads(self._impl.config_json())

    def save(self, path: str) -> None:
        self._impl.save(path)

    def to_bytes(self) -> bytes:
        return self._impl.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Model":
        return cls(_Model.from_bytes(data.decode("utf-8")))

    def predict(self, docs, threads: int = 0) -> list:
        """Returns the documents with predicted clusters in place of gold."""
        return loads_jsonl(self._impl.predict_jsonl(_as_text(docs), threads))

    def pairwise(self, docs, pruned_only: bool = False) -> dict:
        return json.loads(self._impl.pairwise_json(_as_text(docs), pruned_only))


def load_model(path: str) -> Model:
    return Model(_Model.load(path))


def train(docs, config: Optional[dict] = None, threads: int = 0,
          on_epoch: Optional[Callable[[int, float], None]] = None):
    """Trains on docs; returns (model, per-epoch mean losses)."""
    impl, losses = _lingmess.train(_as_text(docs), json.dumps(config or {}), threads,
                                   on_epoch)
    return Model(impl), losses


def evaluate(gold, predicted) -> dict:
    return json.loads(_lingmess.evaluate_json(_as_text(gold), _as_text(predicted)))


def per_doc_conll_f1(gold, predicted) -> list:
    return _lingmess.per_doc_conll_f1(_as_text(gold), _as_text(predicted))


def gradcheck(config: Optional[dict] = None, eps: Optional[float] = None) -> float:
    args = [json.dumps(config) if config else ""]
    if eps is not None:
        args.append(eps)
    return _lingmess.gradcheck(*args)
