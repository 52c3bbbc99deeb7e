"""Prompt emission for script generation, and the context-augmentation
template applied to sub-action texts before embedding.

The two prompt styles ask an external LLM for a JSON object mapping each
candidate action name to its list of sub-actions; running the LLM is the
operator's manual step, the extractor only writes the prompt files and later
ingests the returned JSON.
"""

from __future__ import annotations

from dataclasses import dataclass, field

STYLE_SHORT_FIXED = "short_fixed"
STYLE_CONTEXT_RICH = "context_rich"
STYLES = (STYLE_SHORT_FIXED, STYLE_CONTEXT_RICH)

_SHORT_FIXED_HEADER = """\
Generate a JSON object from the following context.

For each action option given below, create a key in the JSON object with that action name.
The value for each key must be a list of exactly 10 subactions.
Each subaction must be a minimalist, two-word description.
The descriptions should capture the essential mechanics of the action.

Use the following action options and their descriptions for context:
"""

_SHORT_FIXED_FOOTER = """
Output the JSON object accordingly.
"""

_CONTEXT_RICH_HEADER = """\
You will output a JSON object. Each key is an action name from the list below, and its value is a list of concise, visually distinctive subaction descriptions performed sequentially.

Do NOT fix the list length—choose however many substeps best break down that trick into discriminative subactions.

Each subaction should be:
  – Self-contained and visually descriptive with rich {domain} keywords and context.
  – Explicitly reference the scene, objects, environment, and motion in the given sport context.
  – Discriminative and concise.

Here are the actions to decompose:
"""

_CONTEXT_RICH_FOOTER = """
Output ONLY the JSON object, without any additional explanation.
"""

CONTEXT_AUGMENT_TEMPLATE = "This is a video of doing {action} in {domain} with {sub_action}"


@dataclass(frozen=True)
class CandidateAction:
    name: str
    domain: str = ""
    description: str = ""


@dataclass(frozen=True)
class PromptGroup:
    """One multiple-choice candidate set (typically one video's options)."""

    group_id: str
    actions: tuple[CandidateAction, ...] = field(default_factory=tuple)


def build_prompt(actions: list[CandidateAction] | tuple[CandidateAction, ...],
                 style: str) -> str:
    """Fill one prompt template with a candidate list."""
    if style not in STYLES:
        raise ValueError(f"unknown prompt style {style!r}")
    if not actions:
        raise ValueError("cannot build a prompt for an empty candidate list")

    if style == STYLE_SHORT_FIXED:
        lines = [
            f"- {a.name}: {a.description or a.name}" for a in actions
        ]
        return _SHORT_FIXED_HEADER + "\n".join(lines) + "\n" + _SHORT_FIXED_FOOTER

    domain = actions[0].domain or "sport"
    lines = [f"– {a.name} in {a.domain or domain}" for a in actions]
    header = _CONTEXT_RICH_HEADER.format(domain=f"<{domain}>")
    return header + "\n".join(lines) + "\n" + _CONTEXT_RICH_FOOTER


def augment_sub_action(action_name: str, domain: str, sub_action: str) -> str:
    """Wrap one sub-action in the domain-bearing sentence used before
    text embedding."""
    return CONTEXT_AUGMENT_TEMPLATE.format(
        action=action_name, domain=domain, sub_action=sub_action
    )


def augment_name(action_name: str, domain: str) -> str:
    """Domain-enriched class name for the mean-pool baseline variant."""
    return f"{action_name} in {domain}"
