# llm/parsing.py
import re

from .errors import LlmParseError

_FENCED = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_INLINE_FENCED = re.compile(r"```(.*?)```", re.DOTALL)
_TAGGED = re.compile(r"<(proposal|parameter|summary)>(.*?)</\1>", re.DOTALL)


def extract_tag(text: str, tag: str) -> str | None:
    match = re.search(rf"<{re.escape(tag)}>(.*?)</{re.escape(tag)}>", text, re.DOTALL)
    if match and match.group(1).strip():
        return match.group(1).strip()
    return None


def parse_proposal(raw: str) -> str:
    """New parameter text from an optimizer reply.

    Takes the first fenced code block, else the first tagged section, else
    the whole reply trimmed.
    """
    for pattern in (_FENCED, _INLINE_FENCED):
        match = pattern.search(raw)
        if match and match.group(1).strip():
            return match.group(1).strip()

    match = _TAGGED.search(raw)
    if match and match.group(2).strip():
        return match.group(2).strip()

    text = raw.strip()
    if not text:
        raise LlmParseError("reply contains no usable proposal")
    return text
