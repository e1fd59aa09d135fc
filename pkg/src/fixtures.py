"""Bundled fixture corpus: the one-shot example note in both annotation formats,
the before/after post-processing pair for each mode, and the linking example.

The example note's whitespace is arranged so every attested offset verifies
(Residence 88-97, "with husband and kids" 110-131, Job 132-135,
"no longer works" 137-152). `verify_fixture_offsets` guards that.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Tuple

from .annotation.inline import parse_inline
from .annotation.standoff import parse_standoff
from .error_handling import FixtureError, StandoffParseError, StandoffValidationError
from .utils.fs_extra import atomic_write_text

logger = logging.getLogger("sdohkit.fixtures")

EXAMPLE_NOTE = (
    "HABITS: \n"
    "Tobacco Use: denies   Alcohol Use: denies   Drug Use: denies\n"
    "\n"
    "SOCIAL HISTORY: \n"
    "Residence: [LOCATION] with husband and kids\n"
    "Job: no longer works\n"
)

GOLD_STANDOFF = (
    "T1\tLivingStatus 88 97\tResidence\n"
    "T2\tTypeLiving 110 131\twith husband and kids\n"
    "T3\tStatusTime 88 97\tResidence\n"
    "T4\tTobacco 9 20\tTobacco Use\n"
    "T5\tAlcohol 31 42\tAlcohol Use\n"
    "T6\tStatusTime 22 28\tdenies\n"
    "T7\tStatusTime 44 50\tdenies\n"
    "T8\tDrug 53 61\tDrug Use\n"
    "T9\tStatusTime 63 69\tdenies\n"
    "T10\tEmployment 132 135\tJob\n"
    "T11\tStatusEmploy 137 152\tno longer works\n"
    "A1\tTypeLivingVal T2 with_family\n"
    "A2\tStatusTimeVal T3 current\n"
    "A3\tStatusTimeVal T6 none\n"
    "A4\tStatusTimeVal T7 none\n"
    "A5\tStatusTimeVal T9 none\n"
    "A6\tStatusEmployVal T11 unemployed\n"
    "E1\tLivingStatus:T1 Type:T2 Status:T3\n"
    "E2\tTobacco:T4 Status:T6\n"
    "E3\tAlcohol:T5 Status:T7\n"
    "E4\tDrug:T8 Status:T9\n"
    "E5\tEmployment:T10 Status:T11\n"
)

GOLD_INLINE = (
    "HABITS: \n"
    "<<Tobacco Use>>(Tobacco): <<denies>>(StatusTime-none)   "
    "<<Alcohol Use>>(Alcohol): <<denies>>(StatusTime-none)   "
    "<<Drug Use>>(Drug): <<denies>>(StatusTime-none)\n"
    "\n"
    "SOCIAL HISTORY: \n"
    "<<Residence>>(LivingStatus, StatusTime-current): [LOCATION] <<with husband and kids>>(TypeLiving-with_family)\n"
    "<<Job>>(Employment): <<no longer works>>(StatusEmploy-unemployed)\n"
)

# raw model output: a chatty preamble, space-separated columns, wrong offsets, a dangling T14
BEFORE_STANDOFF = (
    "Here are the annotations in BRAT standoff format:\n"
    "T1 LivingStatus 26 35 Residence\n"
    "T2 TypeLiving 43 64 with husband and kids\n"
    "T3 StatusTime 75 97 Residence\n"
    "T4 Tobacco 0 11 Tobacco Use\n"
    "T5\tAlcohol 31 42\tAlcohol Use\n"
    "T6\tStatusTime 22 28\tdenies\n"
    "T7\tStatusTime 44 50\tdenies\n"
    "T8\tDrug 53 61\tDrug Use\n"
    "T9\tStatusTime 63 69\tdenies\n"
    "T10\tEmployment 132 135\tJob\n"
    "T11 StatusEmploy 110 123 no longer works\n"
    "A1 TypeLivingVal T2 with_family\n"
    "A2 StatusTimeVal T3 current\n"
    "A3\tStatusTimeVal T6 none\n"
    "A4\tStatusTimeVal T7 none\n"
    "A5\tStatusTimeVal T9 none\n"
    "A6\tStatusEmployVal T11 unemployed\n"
    "E1 LivingStatus:T1 Type:T14 Status:T3\n"
    "E2\tTobacco:T4 Status:T6\n"
    "E3\tAlcohol:T5 Status:T7\n"
    "E4\tDrug:T8 Status:T9\n"
    "E5\tEmployment:T10 Status:T11\n"
)

AFTER_STANDOFF = GOLD_STANDOFF.replace(
    "E1\tLivingStatus:T1 Type:T2 Status:T3\n", "E1\tLivingStatus:T1 Status:T3\n"
)

# raw model output: trailing spaces lost, an inserted "Status" token, a trailing period
BEFORE_INLINE = (
    "HABITS:\n"
    "<<Tobacco Use>>(Tobacco): <<denies>>(StatusTime-none)  "
    "<<Alcohol Use>>(Alcohol): <<denies>>(StatusTime-none)   "
    "<<Drug Use>>(Drug): <<denies>>(StatusTime-none)\n"
    "\n"
    "SOCIAL HISTORY:\n"
    "<<Residence>>(LivingStatus, StatusTime-current): [LOCATION] <<with husband and kids>>(TypeLiving-with_family)\n"
    "<<Job>>(Employment) Status: <<no longer works>>(StatusEmploy-unemployed).\n"
)

LINKING_INPUT = (
    "T1\tLivingStatus 88 97\tResidence\n"
    "T2\tTypeLiving 110 131\twith husband and kids\n"
    "T3\tStatusTime 88 97\tResidence\n"
    "T4\tEmployment 132 135\tJob\n"
    "T5\tStatusEmploy 137 152\tno longer works\n"
    "A1\tTypeLivingVal T2 with_family\n"
    "A2\tStatusTimeVal T3 current\n"
    "A6\tStatusEmployVal T5 unemployed\n"
)

LINKING_EXPECTED = LINKING_INPUT + (
    "E1\tLivingStatus:T1 Type:T2 Status:T3\n"
    "E2\tEmployment:T4 Status:T5\n"
)

GUIDELINE_SAMPLE = """\
The annotation involves the identification of SDOH events, where each SDOH event is represented by a trigger and set of entities. The trigger consists of a multi-word span (word or phrase) and a label indicating the type of SDOH (e.g. employment or tobacco use). All annotated phenomena are defined in terms of the span (words associated with phenomena) and the span type (e.g. amount, status, etc.), and some annotated phenomena, like status, will also include a span label (e.g. current or past).
You are given a document that contains the following list of events and entities:

[EVENTS]
- {Alcohol}: {Alcohol} event indicates the usage of alcohol. The trigger span should be a noun phrase describing a general substance type, like "alcohol" if present.

[ENTITIES]

<Span only entities>
- {Amount}: Linked to substance use events ({Alcohol}, {Drug}, {Tobacco}). {Amount} indicates the quantity of the substance used by the patient (e.g. "three drinks" or "2 packs").
"""

FIXTURE_FILES: Dict[str, str] = {
    "example.txt": EXAMPLE_NOTE,
    "example.ann": GOLD_STANDOFF,
    "example.marked": GOLD_INLINE,
    "before_standoff.ann": BEFORE_STANDOFF,
    "after_standoff.ann": AFTER_STANDOFF,
    "before_inline.marked": BEFORE_INLINE,
    "linking_input.ann": LINKING_INPUT,
    "linking_expected.ann": LINKING_EXPECTED,
    "guideline.md": GUIDELINE_SAMPLE,
}

ATTESTED_SPANS: Tuple[Tuple[int, int, str], ...] = (
    (88, 97, "Residence"),
    (110, 131, "with husband and kids"),
    (132, 135, "Job"),
    (137, 152, "no longer works"),
)


def verify_fixture_offsets() -> None:
    """Raise FixtureError unless every bundled document lines up with the example note."""
    for start, end, text in ATTESTED_SPANS:
        if EXAMPLE_NOTE[start:end] != text:
            raise FixtureError(
                f"example note has {EXAMPLE_NOTE[start:end]!r} at {start}-{end}, expected {text!r}",
                {"start": start, "end": end},
            )
    for name in ("example.ann", "after_standoff.ann", "linking_input.ann", "linking_expected.ann"):
        try:
            parse_standoff(FIXTURE_FILES[name], EXAMPLE_NOTE, strict=True)
        except (StandoffParseError, StandoffValidationError) as e:
            raise FixtureError(f"{name} does not verify against the example note: {e}", {"file": name}) from e
    stripped, _, diagnostics = parse_inline(GOLD_INLINE)
    if stripped != EXAMPLE_NOTE or diagnostics:
        raise FixtureError("example.marked does not strip back to the example note")


def write_fixtures(out_dir: str | Path) -> List[Path]:
    """Materialize the fixture corpus; rewriting yields identical bytes."""
    verify_fixture_offsets()
    out = Path(out_dir)
    written = [atomic_write_text(out / name, content) for name, content in FIXTURE_FILES.items()]
    logger.info("wrote %d fixture file(s) to %s", len(written), out)
    return written
