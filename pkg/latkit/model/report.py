import json
import numbers

from latkit import __version__
from latkit.constants import Constants
from latkit.exceptions.latkit_exception import LatkitValidationException

PROVENANCES = (Constants.PROVENANCE_PAPER.value, Constants.PROVENANCE_TRIVIAL.value,
               Constants.PROVENANCE_DERIVED.value)


def normalize(value):
    """JSON-compatible form used to compare computed and expected values."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    if hasattr(value, 'to_json'):
        return normalize(value.to_json())
    if isinstance(value, dict):
        return {str(k): normalize(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [normalize(v) for v in value]
        return sorted(items, key=json.dumps) if isinstance(value, (set, frozenset)) else items
    return str(value)


class Claim:
    """
    One checked statement of a scenario.

    Parameters
    ----------
    claim_id
        short identifier, unique within the scenario
    anchor
        the statement being re-derived, quoted
    computed
        value produced by the library (normalized to JSON)
    expected
        frozen expected value
    provenance
        PAPER, TRIVIAL or DERIVED
    error
        message of an exception raised while computing, if any
    resource_limited
        True when the failure was a search or size limit

    Notes
    -----
    A claim passes iff it raised nothing and computed equals expected.
    """

    def __init__(self, claim_id, anchor, computed, expected, provenance, error=None, resource_limited=False):
        if provenance not in PROVENANCES:
            raise LatkitValidationException('ERROR 40: unknown provenance {0} for claim {1}.'.format(provenance, claim_id))
        self.claim_id = claim_id
        self.anchor = anchor
        self.computed = normalize(computed)
        self.expected = normalize(expected)
        self.provenance = provenance
        self.error = error
        self.resource_limited = resource_limited

    @property
    def passed(self) -> bool:
        return self.error is None and self.computed == self.expected

    def to_json(self) -> dict:
        out = {
            "id": self.claim_id,
            "anchor": self.anchor,
            "computed": self.computed,
            "expected": self.expected,
            "provenance": self.provenance,
            "pass": self.passed,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


class ScenarioReport:
    """
    Outcome of one verification scenario: its claims, advisory notes and timing.
    """

    def __init__(self, scenario, claims=None, notes=None, elapsed_ms=0, version=__version__):
        self.scenario = scenario
        self.claims = list(claims or [])
        self.notes = list(notes or [])
        self.elapsed_ms = elapsed_ms
        self.version = version

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    @property
    def resource_limited(self) -> bool:
        return any(c.resource_limited for c in self.claims)

    def failed_claims(self):
        return [c for c in self.claims if not c.passed]

    def to_json(self, with_timing: bool = True) -> dict:
        out = {
            "scenario": self.scenario,
            "claims": [c.to_json() for c in self.claims],
            "pass": self.passed,
            "version": self.version,
            "notes": list(self.notes),
        }
        if with_timing:
            out["elapsed_ms"] = self.elapsed_ms
        return out

    def dumps(self, with_timing: bool = True) -> str:
        return json.dumps(self.to_json(with_timing), indent=2, sort_keys=True)
