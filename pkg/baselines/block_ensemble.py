import logging

from data_classes import Instance, Prediction, ScoreVector, StreamSchema, StreamSource
from evaluation import RunTrace
from evaluation import test_then_train as evaluate_prequentially
from goowe import ChunkEnsemble, GooweConfig, LearnerFactory

from .weighting_rules import AccuracyUpdated, MajorityVote, WeightingRule, parse_rule

logger = logging.getLogger(__name__)


class BlockEnsemble(ChunkEnsemble):
    """
    The chunk ensemble with a pluggable vote rule and replacement rule.

    Training is the same as GOOWE's, so swapping one rule changes only the
    aspect it governs.
    """

    def __init__(
        self,
        schema: StreamSchema,
        learner_factory: LearnerFactory,
        vote_rule: WeightingRule,
        replacement_rule: WeightingRule,
        config: GooweConfig = GooweConfig(),
        name: str | None = None,
    ):
        """
        Initialize an empty scaffold

        Args:
            schema (StreamSchema): The stream schema
            learner_factory (Callable): Builds a fresh, untrained component
            vote_rule (WeightingRule): Aggregates the votes
            replacement_rule (WeightingRule): Picks the component to drop when full
            config (GooweConfig): Ensemble size, chunk and window lengths, memory limit
            name (str | None): Label in traces
        """
        if vote_rule is replacement_rule:
            raise ValueError("Vote and replacement rules must be separate instances")
        super().__init__(schema, learner_factory, config)
        self.vote_rule = vote_rule
        self.replacement_rule = replacement_rule
        self.name = name or f"block[{vote_rule.name}/{replacement_rule.name}]"
        vote_rule.bind(self)
        replacement_rule.bind(self)

    @property
    def rules(self) -> tuple[WeightingRule, WeightingRule]:
        return self.vote_rule, self.replacement_rule

    def predict(self, scores: dict[int, ScoreVector]) -> Prediction:
        return self.vote_rule.predict(self, scores)

    def observe(self, instance: Instance, scores: dict[int, ScoreVector]) -> None:
        for rule in self.rules:
            rule.observe(self, instance, scores)

    def before_replacement(self, chunk: list[Instance]) -> None:
        for rule in self.rules:
            rule.evaluate_chunk(self, chunk)

    def select_victim(self, chunk: list[Instance]) -> int:
        return self.replacement_rule.select_victim(self, chunk)

    def components_changed(self, chunk: list[Instance]) -> None:
        for rule in self.rules:
            rule.components_changed(self, chunk)


def _rule(rule: WeightingRule | str) -> WeightingRule:
    return parse_rule(rule) if isinstance(rule, str) else rule


def base1(
    schema: StreamSchema,
    learner_factory: LearnerFactory,
    vote_rule: WeightingRule | str,
    config: GooweConfig = GooweConfig(),
) -> BlockEnsemble:
    """AUE2's training and replacement with a swapped vote rule"""
    vote = _rule(vote_rule)
    return BlockEnsemble(
        schema, learner_factory, vote, AccuracyUpdated(), config, name=f"base1[{vote.name}]"
    )


def base2(
    schema: StreamSchema,
    learner_factory: LearnerFactory,
    replacement_rule: WeightingRule | str,
    config: GooweConfig = GooweConfig(),
) -> BlockEnsemble:
    """Majority voting with a swapped replacement rule"""
    replacement = _rule(replacement_rule)
    return BlockEnsemble(
        schema,
        learner_factory,
        MajorityVote(),
        replacement,
        config,
        name=f"base2[{replacement.name}]",
    )


def base1_run(
    vote_rule: WeightingRule | str,
    stream: StreamSource,
    learner_factory: LearnerFactory,
    config: GooweConfig = GooweConfig(),
    report_interval: int = 500,
    max_instances: int | None = None,
    seed: int | None = None,
) -> RunTrace:
    """Evaluate Base1 with the given vote rule prequentially"""
    ensemble = base1(stream.schema(), learner_factory, vote_rule, config)
    return evaluate_prequentially(ensemble, stream, report_interval, max_instances, seed)


def base2_run(
    replacement_rule: WeightingRule | str,
    stream: StreamSource,
    learner_factory: LearnerFactory,
    config: GooweConfig = GooweConfig(),
    report_interval: int = 500,
    max_instances: int | None = None,
    seed: int | None = None,
) -> RunTrace:
    """Evaluate Base2 with the given replacement rule prequentially"""
    ensemble = base2(stream.schema(), learner_factory, replacement_rule, config)
    return evaluate_prequentially(ensemble, stream, report_interval, max_instances, seed)
