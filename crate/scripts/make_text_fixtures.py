#!/usr/bin/env python3
"""Generate the messy model-output corpus and the canned mock responses.

The corpus mimics the output variety of real vision models: clean JSON,
fenced JSON, key-value lists, verbose prose, and a couple of answers with
no extractable content at all. Each entry carries the expected verdict
(or null when even a careful reader could not produce one), so tests can
check both the extraction rate and extraction correctness.
"""

import json
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "crates", "lastmile", "fixtures")

YN = lambda b: "yes" if b else "no"


def direct_entries():
    """30 outputs the structured parser should handle without a fallback."""
    entries = []
    patterns = [
        (True, False, False, False), (False, True, False, False),
        (False, False, True, False), (False, False, False, True),
        (True, True, False, False), (False, False, False, False),
        (True, False, True, False), (False, True, False, True),
        (True, True, True, True), (False, True, True, False),
    ]

    def add(text, exp):
        entries.append({"text": text, "expected": dict(zip(("q1", "q2", "q3", "q4"), exp))})

    # plain JSON with assorted value spellings
    for i, exp in enumerate(patterns[:6]):
        vals = [YN(v) for v in exp]
        if i == 1:
            body = json.dumps({f"q{k+1}": exp[k] for k in range(4)})
        elif i == 2:
            body = json.dumps({f"q{k+1}": int(exp[k]) for k in range(4)})
        elif i == 3:
            body = json.dumps({f"Q{k+1}": vals[k].upper() for k in range(4)})
        elif i == 4:
            body = json.dumps({f"q{k+1}": ("y" if exp[k] else "n") for k in range(4)})
        else:
            body = json.dumps({f"q{k+1}": vals[k] for k in range(4)})
        add(body, exp)

    # fenced blocks
    for i, exp in enumerate(patterns[6:9]):
        body = json.dumps({f"q{k+1}": YN(exp[k]) for k in range(4)}, indent=2 if i == 0 else None)
        fence = "```json" if i != 1 else "```"
        add(f"{fence}\n{body}\n```", exp)

    # JSON wrapped in chatter
    chatty = [
        ("Sure, here is my assessment of the leg:", patterns[0]),
        ("After looking closely at the map:", patterns[3]),
        ("Result — ", patterns[9]),
    ]
    for prefix, exp in chatty:
        body = json.dumps({f"q{k+1}": YN(exp[k]) for k in range(4)})
        add(f"{prefix}\n{body}\nLet me know if you need more detail.", exp)

    # extra keys / nested object (rescued by the token scan)
    add('{"q1":"no","q2":"no","q3":"yes","q4":"no","confidence":"high"}',
        (False, False, True, False))
    add('{"answers":{"q1":"yes","q2":"yes","q3":"no","q4":"no"},"note":"map is blurry"}',
        (True, True, False, False))

    # key-value styles
    kv_styles = [
        ("q1: {0}\nq2: {1}\nq3: {2}\nq4: {3}", patterns[1]),
        ("- q1: {0}\n- q2: {1}\n- q3: {2}\n- q4: {3}", patterns[2]),
        ("Q1 - {0}; Q2 - {1}; Q3 - {2}; Q4 - {3}.", patterns[4]),
        ("q1={0} q2={1} q3={2} q4={3}", patterns[5]),
        ("Answers: q1 {0}, q2 {1}, q3 {2}, q4 {3}", patterns[7]),
        ("**q1**: {0}\n**q2**: {1}\n**q3**: {2}\n**q4**: {3}", patterns[8]),
    ]
    for fmt, exp in kv_styles:
        vals = [YN(v) for v in exp]
        if fmt.startswith("Q1"):
            vals = [v.capitalize() for v in vals]
        add(fmt.format(*vals), exp)

    # value-spelling variety in key-value form
    add("q1: true\nq2: false\nq3: false\nq4: true", (True, False, False, True))
    add("q1: NO\nq2: YES\nq3: NO\nq4: NO", (False, True, False, False))
    add("q1:0\nq2:0\nq3:1\nq4:1", (False, False, True, True))
    add("q1 = n, q2 = y, q3 = n, q4 = n", (False, True, False, False))

    # fenced with trailing commentary outside the fence
    add('```json\n{"q1":"yes","q2":"no","q3":"yes","q4":"yes"}\n```\nThe water crossing is on the west side.',
        (True, False, True, True))
    add('Here you go:\n```\n{"q1":"no","q2":"yes","q3":"yes","q4":"no"}\n```',
        (False, True, True, False))

    # whitespace and ordering quirks
    add('  \n {"q4":"no","q3":"no","q2":"no","q1":"yes"} \n', (True, False, False, False))
    add('{\n  "q1" : "no" ,\n  "q2" : "no" ,\n  "q3" : "yes" ,\n  "q4" : "yes"\n}',
        (False, False, True, True))
    add("q1 answer: no\nq2 answer: no\nq3 answer: no\nq4 answer: yes",
        (False, False, False, True))
    add('{"q1": "No", "q2": "No", "q3": "No", "q4": "No"}',
        (False, False, False, False))

    assert len(entries) == 30, len(entries)
    return entries


def prose_entries():
    """18 verbose answers that need the second-model extraction pass."""
    texts = [
        ("Looking at the image, the red route clearly crosses the river near the middle "
         "of the map. I see no railway anywhere along the path. The route stays clear of "
         "any pedestrian zone. It also does not enter a park or any green space.",
         (True, False, False, False)),
        ("The marked route runs over a small stream twice. It also cuts across a railway "
         "near the northern end. There is no pedestrian plaza on the way. No park or "
         "forest is touched either.",
         (True, True, False, False)),
        ("No water body is crossed by this leg. The path does cross a railway at a level "
         "crossing. It avoids every pedestrian area. Toward the end it passes through a "
         "large park.",
         (False, True, False, True)),
        ("This leg stays away from any river or lake. There is no railway in the frame. "
         "The route goes straight through a pedestrian street for a block. No park or "
         "wooded area is involved.",
         (False, False, True, False)),
        ("The route does not cross water. It never touches a railway. It does not pass a "
         "pedestrian zone. However, a long stretch runs through the forest in the south.",
         (False, False, False, True)),
        ("I can see the red line fording a canal. A railway runs parallel but the route "
         "never crosses the railway itself. A short section uses a walkway meant for foot "
         "traffic. The leg also clips the corner of a park.",
         (True, False, True, True)),
        ("Water: the leg bridges a pond outlet. Railway: not present on this leg. "
         "Pedestrian: the destination sits inside a pedestrian plaza. Park: no forest or "
         "garden is crossed.",
         (True, False, True, False)),
        ("After tracing the red polyline carefully, it does cross the lake's narrow arm. "
         "It crosses the railway too, right before the last turn. It does not use any "
         "pedestrian path. It does not go through a park.",
         (True, True, False, False)),
        ("There is no river, lake or other water on this route. No railway either. The "
         "street section near the start is a pedestrian street. The final approach runs "
         "through a wooded area.",
         (False, False, True, True)),
        ("The leg is entirely on ordinary streets: no water is crossed, no railway is "
         "crossed, no pedestrian zone is entered, and no park appears along the way.",
         (False, False, False, False)),
        ("Everything about this leg is problematic. It crosses a stream. It crosses a "
         "railway. It runs through a pedestrian market street. It cuts across a forest "
         "reserve.",
         (True, True, True, True)),
        ("The path hops over a drainage canal early on. Later it follows the rail line "
         "for a while and eventually crosses the railway. No pedestrian area though. No "
         "park either.",
         (True, True, False, False)),
        ("My reading: the route avoids water entirely. It does cross the railway spur. "
         "It walks through the pedestrian bazaar. It stays out of the park.",
         (False, True, True, False)),
        ("The red line stays on the road network the whole way. No water. No railway. No "
         "pedestrian section. It does skim the edge of a garden, which I would count as "
         "passing through a park.",
         (False, False, False, True)),
        ("First half: nothing notable, no water and no railway. Second half: the route "
         "enters a pedestrian precinct and then continues through the city park to the "
         "stop.",
         (False, False, True, True)),
        ("I looked twice and the leg does cross the river at the old bridge. No railway "
         "is visible. No pedestrian area is used. The leg then traverses a forest patch "
         "before ending.",
         (True, False, False, True)),
        ("Verdict in words: water crossing present. Railway crossing present. Pedestrian "
         "zone not present. Park or forest not present.",
         (True, True, False, False)),
        ("The route keeps to arterial roads, avoiding the lake shown nearby, so no water "
         "is crossed. It does have to cross the railway once. No pedestrian street is "
         "involved. No park is involved.",
         (False, True, False, False)),
    ]
    return [
        {"text": t, "expected": dict(zip(("q1", "q2", "q3", "q4"), exp))}
        for t, exp in texts
    ]


def unrecoverable_entries():
    """2 outputs no extractor can turn into four answers (~4% of 50)."""
    return [
        {"text": "The route seems fine to me overall.", "expected": None},
        {"text": "I cannot tell much from this image, sorry.", "expected": None},
    ]


def mock_responses():
    """Canned vision-model bodies served by the offline mock endpoint."""
    return [
        '{"q1":"no","q2":"no","q3":"no","q4":"no"}',
        '{"q1":"yes","q2":"no","q3":"no","q4":"no"}',
        '{"q1":"no","q2":"yes","q3":"no","q4":"no"}',
        '{"q1":"no","q2":"no","q3":"yes","q4":"no"}',
        '{"q1":"no","q2":"no","q3":"no","q4":"yes"}',
        '```json\n{"q1":"yes","q2":"yes","q3":"no","q4":"no"}\n```',
        ("The red route crosses the stream on the east side, but there is no railway "
         "in view. It does not pass through any pedestrian area. It does run through "
         "the edge of a park."),
        '{"q1":"no","q2":"yes","q3":"yes","q4":"no"}',
    ]


def main():
    entries = direct_entries() + prose_entries() + unrecoverable_entries()
    assert len(entries) == 50, len(entries)
    corpus = [
        {"id": f"msg_{i:02d}", "text": e["text"], "expected": e["expected"]}
        for i, e in enumerate(entries)
    ]
    recoverable = sum(1 for e in corpus if e["expected"] is not None)
    print(f"corpus: {len(corpus)} messages, {recoverable} recoverable")

    os.makedirs(OUT_DIR, exist_ok=True)
    with open(os.path.join(OUT_DIR, "messy_outputs.json"), "w") as f:
        json.dump(corpus, f, indent=1)
        f.write("\n")
    with open(os.path.join(OUT_DIR, "mock_responses.json"), "w") as f:
        json.dump({"responses": mock_responses()}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
