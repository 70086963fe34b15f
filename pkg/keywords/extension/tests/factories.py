import factory
from factory import Faker
from factory import Sequence
from factory.django import DjangoModelFactory

from keywords.extension.models import EvaluationRun
from keywords.extension.utils.datasets import QueryRecord


class EvaluationRunFactory(DjangoModelFactory[EvaluationRun]):
    name = Faker("slug")
    status = "completed"
    query_count = 10
    manifest = factory.LazyFunction(lambda: {"command": "evaluate", "config": {"ks": [5]}})
    report = factory.LazyFunction(lambda: {"systems": []})
    processing_time = 1.5

    class Meta:
        model = EvaluationRun


class QueryRecordFactory(factory.Factory):
    record_id = Sequence(lambda n: n + 1)
    query = Faker("sentence", nb_words=3)
    golden = factory.LazyAttribute(lambda record: (record.query.lower().rstrip("."),))
    scenario = None

    class Meta:
        model = QueryRecord
