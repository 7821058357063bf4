"""Regenerate the demo corpus, stub fixtures, QA set, and config.

Run from the repository root: python3 demo/make_fixtures.py
"""

import json
from pathlib import Path

DEMO = Path(__file__).parent

DOCS = [
    {
        "title": "Portrait of George Dyer Talking",
        "text": (
            "Portrait of George Dyer Talking is an oil painting by Francis Bacon "
            "executed in 1966. It is a portrait of his lover George Dyer made at "
            "the height of Bacon's creative power. It depicts Dyer sitting on a "
            "revolving office stool in a luridly coloured room. His body and face "
            "are contorted, and his legs are tightly crossed. His head appears to "
            "be framed within a window or door. Above him is a naked hanging "
            "lightbulb, a favourite motif of Bacon's. The work contains a number "
            "of spatial ambiguities, not least that Dyer's body seems to be "
            "positioned both in the fore- and background."
        ),
    },
    {
        "title": "Francis Bacon",
        "text": (
            "Francis Bacon was born on 22 January 1561 at York House near the "
            "Strand in London, the son of Sir Nicholas Bacon (Lord Keeper of the "
            "Great Seal) by his second wife, Anne (Cooke) Bacon, the daughter of "
            "the noted humanist Anthony Cooke. His mother's sister was married to "
            "William Cecil, 1st Baron Burghley, making Burghley Bacon's uncle."
        ),
    },
    {
        "title": "Head I",
        "text": (
            "Head I is a relatively small oil and tempera on hardboard painting "
            "by the Irish-born British figurative artist Francis Bacon. Completed "
            "in 1948, it is the first in a series of six heads, the remainder of "
            "which were painted the following year in preparation for a November "
            "1949 exhibition at the Hanover Gallery in London. Like the others in "
            "the series, it shows a screaming figure alone in a room, and focuses "
            "on the open mouth. The work shows a skull which has disintegrated on "
            "itself and is largely a formless blob of flesh. The entire upper "
            "half has disappeared, leaving only the jaw, mouth and teeth and one "
            "ear still intact."
        ),
    },
    {
        "title": "Portrait of Dürer's Father at 70",
        "text": (
            "Portrait of Dürer's Father at 70 is a 1497 oil painting attributed "
            "to the German Renaissance artist Albrecht Dürer. It shows the "
            "artist's father, the goldsmith Albrecht Dürer the Elder, at the age "
            "of seventy. The sitter, often identified simply as Dürer's Father, "
            "is presented against a plain ground in a dark robe. The portrait "
            "entered the English royal collection in the seventeenth century and "
            "is now held by the National Gallery in London."
        ),
    },
]

# Substrings unique to each extraction stage's prompt template.
STAGE_MARKERS = {
    "entities": "Identify as many entities as possible in the text",
    "pairs": "conduct a full-scale pairwise analysis",
    "keywords": "extract the high-level keywords that can summarize",
    "associations": "construct a high-order association set",
}

EXTRACTIONS = {
    "Portrait of George Dyer Talking": {
        "entities": [
            {
                "entity_name": "George Dyer",
                "entity_description": "George Dyer was the lover of Francis Bacon and the sitter of Portrait of George Dyer Talking.",
                "attributes": ["lover of Francis Bacon"],
            },
            {
                "entity_name": "Francis Bacon",
                "entity_description": "Francis Bacon is the painter who executed Portrait of George Dyer Talking in 1966.",
                "attributes": ["painter"],
            },
            {
                "entity_name": "Portrait of George Dyer Talking",
                "entity_description": "Portrait of George Dyer Talking is a 1966 oil painting by Francis Bacon depicting George Dyer in a luridly coloured room.",
                "attributes": ["oil painting", "1966"],
            },
        ],
        "pairs": [
            {
                "entities_pair": ["George Dyer", "Francis Bacon"],
                "relationship_description": "George Dyer was the lover and frequent model of Francis Bacon.",
            },
            {
                "entities_pair": ["Francis Bacon", "Portrait of George Dyer Talking"],
                "relationship_description": "Francis Bacon executed Portrait of George Dyer Talking in 1966.",
            },
        ],
        "keywords": {"high_level_keywords": ["portrait painting", "artistic representation"]},
        "associations": [],
    },
    "Francis Bacon": {
        "entities": [
            {
                "entity_name": "Francis Bacon",
                "entity_description": "Francis Bacon was born on 22 January 1561 at York House near the Strand in London.",
                "attributes": ["born 1561"],
            },
            {
                "entity_name": "Sir Nicholas Bacon",
                "entity_description": "Sir Nicholas Bacon was the Lord Keeper of the Great Seal and the father of Francis Bacon.",
                "attributes": ["Lord Keeper of the Great Seal"],
            },
            {
                "entity_name": "Anne (Cooke) Bacon",
                "entity_description": "Anne (Cooke) Bacon was the second wife of Sir Nicholas Bacon and the mother of Francis Bacon.",
                "attributes": [],
            },
            {
                "entity_name": "William Cecil, 1st Baron Burghley",
                "entity_description": "William Cecil, 1st Baron Burghley was married to the sister of Francis Bacon's mother, making him Bacon's uncle.",
                "attributes": ["uncle of Francis Bacon"],
            },
        ],
        "pairs": [
            {
                "entities_pair": ["Francis Bacon", "Sir Nicholas Bacon"],
                "relationship_description": "Francis Bacon was the son of Sir Nicholas Bacon, Lord Keeper of the Great Seal.",
            },
            {
                "entities_pair": ["Francis Bacon", "Anne (Cooke) Bacon"],
                "relationship_description": "Anne (Cooke) Bacon was the mother of Francis Bacon.",
            },
            {
                "entities_pair": ["Sir Nicholas Bacon", "Francis Bacon"],
                "relationship_description": "Sir Nicholas Bacon was the father of Francis Bacon.",
            },
            {
                "entities_pair": ["Francis Bacon", "William Cecil, 1st Baron Burghley"],
                "relationship_description": "William Cecil, 1st Baron Burghley was Francis Bacon's uncle by marriage.",
            },
            {
                "entities_pair": ["Anne (Cooke) Bacon", "Anthony Cooke"],
                "relationship_description": "Anne (Cooke) Bacon was the daughter of the noted humanist Anthony Cooke.",
            },
        ],
        "keywords": {"high_level_keywords": ["family lineage", "Elizabethan statesmen"]},
        "associations": [
            {
                "entities_set": ["Francis Bacon", "Sir Nicholas Bacon", "Anne (Cooke) Bacon"],
                "relationship_description": "Family of Francis Bacon: son of Sir Nicholas Bacon and his second wife Anne (Cooke) Bacon.",
            }
        ],
    },
    "Head I": {
        "entities": [
            {
                "entity_name": "Head I",
                "entity_description": "Head I is a small oil and tempera painting completed in 1948, the first in a series of six heads.",
                "attributes": ["oil and tempera", "1948"],
            },
            {
                "entity_name": "Francis Bacon",
                "entity_description": "Francis Bacon is the Irish-born British figurative artist who painted Head I.",
                "attributes": [],
            },
        ],
        "pairs": [
            {
                "entities_pair": ["Francis Bacon", "Head I"],
                "relationship_description": "Head I was painted by Francis Bacon in 1948.",
            }
        ],
        "keywords": {"high_level_keywords": ["expressionist portraiture", "post-war art"]},
        "associations": [],
    },
    "Portrait of Dürer's Father at 70": {
        "entities": [
            {
                "entity_name": "Portrait of Dürer's Father at 70",
                "entity_description": "Portrait of Dürer's Father at 70 is a 1497 oil painting showing the artist's father at the age of seventy.",
                "attributes": ["oil painting", "1497"],
            },
            {
                "entity_name": "Albrecht Dürer",
                "entity_description": "Albrecht Dürer was a German Renaissance artist who painted his father in 1497.",
                "attributes": ["German Renaissance artist"],
            },
            {
                "entity_name": "Albrecht Dürer the Elder",
                "entity_description": "Albrecht Dürer the Elder was a goldsmith and the father of Albrecht Dürer.",
                "attributes": ["goldsmith"],
            },
            {
                "entity_name": "Dürer's Father",
                "entity_description": "Dürer's Father refers to Albrecht Dürer the Elder as depicted in the 1497 portrait.",
                "attributes": [],
            },
        ],
        "pairs": [
            {
                "entities_pair": ["Albrecht Dürer", "Albrecht Dürer the Elder"],
                "relationship_description": "Albrecht Dürer painted his father Albrecht Dürer the Elder.",
            },
            {
                "entities_pair": ["Albrecht Dürer", "Portrait of Dürer's Father at 70"],
                "relationship_description": "Albrecht Dürer painted Portrait of Dürer's Father at 70 in 1497.",
            },
        ],
        "keywords": {"high_level_keywords": ["Renaissance portraiture", "family portraits"]},
        "associations": [
            {
                "entities_set": [
                    "Albrecht Dürer",
                    "Albrecht Dürer the Elder",
                    "Portrait of Dürer's Father at 70",
                ],
                "relationship_description": "Albrecht Dürer portrayed his father Albrecht Dürer the Elder in Portrait of Dürer's Father at 70.",
            }
        ],
    },
}

QA = [
    {
        "question": "Who was the father of The Portrait of George Dyer Talking's creator?",
        "answers": ["Sir Nicholas Bacon"],
        "strategy": {
            "rewrite_question": "Who is the father of Francis Bacon, the creator of the artwork titled 'The Portrait of George Dyer Talking'?",
            "key_entities": "[Francis Bacon | Father, The Portrait of George Dyer Talking | Artwork | Painting]",
            "keywords": "father, Francis Bacon, The Portrait of George Dyer Talking, creator, art",
            "target_layer": 1,
            "matching_score": 4,
            "semantic_depth": 2,
        },
        "reply": (
            "Thought: The creator of Portrait of George Dyer Talking is Francis Bacon. "
            "According to the data, Francis Bacon was the son of Sir Nicholas Bacon, who "
            "held the position of Lord Keeper of the Great Seal. Therefore, Sir Nicholas "
            "Bacon is the father of the artist who created Portrait of George Dyer "
            "Talking. Answer: Sir Nicholas Bacon."
        ),
    },
    {
        "question": "Who painted Head I?",
        "answers": ["Francis Bacon"],
        "strategy": {
            "rewrite_question": "Who is the artist that painted the artwork Head I?",
            "key_entities": "[Head I | Painting, Francis Bacon | Artist]",
            "keywords": "painted, Head I, artist",
            "target_layer": 2,
            "matching_score": 5,
            "semantic_depth": 1,
        },
        "reply": (
            "Thought: Head I is a painting by the Irish-born British figurative artist "
            "Francis Bacon, completed in 1948. Answer: Francis Bacon."
        ),
    },
    {
        "question": "Who was Francis Bacon's mother?",
        "answers": ["Anne (Cooke) Bacon", "Anne Cooke Bacon"],
        "strategy": {
            "rewrite_question": "Who was the mother of Francis Bacon?",
            "key_entities": "[Francis Bacon | Bacon, Anne (Cooke) Bacon | Mother]",
            "keywords": "mother, Francis Bacon, family",
            "target_layer": 2,
            "matching_score": 4,
            "semantic_depth": 2,
        },
        "reply": (
            "Thought: The data states Francis Bacon was born to Sir Nicholas Bacon by his "
            "second wife, Anne (Cooke) Bacon. Answer: Anne (Cooke) Bacon."
        ),
    },
    {
        "question": "Who is depicted in Portrait of Dürer's Father at 70?",
        "answers": ["Albrecht Dürer the Elder", "Dürer's Father"],
        "strategy": {
            "rewrite_question": "Which person is shown in the painting Portrait of Dürer's Father at 70?",
            "key_entities": "[Portrait of Dürer's Father at 70 | Painting, Albrecht Dürer the Elder | Sitter]",
            "keywords": "depicted, portrait, Dürer, father",
            "target_layer": 1,
            "matching_score": 5,
            "semantic_depth": 1,
        },
        "reply": (
            "Thought: The portrait by Albrecht Dürer shows the artist's father, the "
            "goldsmith Albrecht Dürer the Elder, at the age of seventy. Answer: Albrecht "
            "Dürer the Elder."
        ),
    },
    {
        "question": "Who was Francis Bacon's uncle?",
        "answers": ["William Cecil, 1st Baron Burghley", "William Cecil"],
        "strategy": {
            "rewrite_question": "Which person was the uncle of Francis Bacon?",
            "key_entities": "[Francis Bacon | Bacon, William Cecil, 1st Baron Burghley | Uncle | Burghley]",
            "keywords": "uncle, Francis Bacon, family, Burghley",
            "target_layer": 3,
            "matching_score": 3,
            "semantic_depth": 3,
        },
        "reply": (
            "Thought: The data notes that the sister of Francis Bacon's mother was "
            "married to William Cecil, 1st Baron Burghley, which made Burghley the uncle "
            "of Francis Bacon. Answer: William Cecil, 1st Baron Burghley."
        ),
    },
]

JUDGE_REPLY = {
    "Commonalities": "The given answer names the same person as the reference answer.",
    "Exact Match": {
        "Explanation": "The answer is completely consistent with the reference answer.",
        "Level": "5",
        "Score": "95.00",
    },
    "Recall": {
        "Explanation": "All key facts of the reference answer are covered.",
        "Level": "5",
        "Score": "90.00",
    },
    "Precision": {
        "Explanation": "No extraneous or incorrect content is present.",
        "Level": "5",
        "Score": "85.00",
    },
}


def strategy_reply(s: dict) -> str:
    return (
        f"rewrite_question: {s['rewrite_question']}\n"
        f"key_entities: {s['key_entities']}\n"
        f"keywords: {s['keywords']}\n"
        f"target_layer: {s['target_layer']}\n"
        f"matching_score: {s['matching_score']}\n"
        f"semantic_depth: {s['semantic_depth']}\n"
    )


def build_fixtures() -> list[dict]:
    fixtures = []
    # Later stages first: a stage-4 conversation also contains the earlier
    # stage prompts, so earlier-stage fixtures would shadow it otherwise.
    for doc in DOCS:
        title_marker = f"Title: {doc['title']}"
        extraction = EXTRACTIONS[doc["title"]]
        for stage in ("associations", "keywords", "pairs", "entities"):
            fixtures.append(
                {
                    "match": [STAGE_MARKERS[stage], title_marker],
                    "reply": json.dumps(extraction[stage], ensure_ascii=False, indent=1),
                }
            )
    for qa in QA:
        fixtures.append(
            {
                "match": ["---Question---", qa["question"]],
                "reply": strategy_reply(qa["strategy"]),
            }
        )
        fixtures.append(
            {
                "match": ['Your response starts after "Thought:"', qa["question"]],
                "reply": qa["reply"],
            }
        )
    fixtures.append(
        {
            "match": ["your task is to assess the quality of the given answers"],
            "reply": json.dumps(JUDGE_REPLY, ensure_ascii=False, indent=1),
        }
    )
    return fixtures


def main() -> None:
    with open(DEMO / "corpus.jsonl", "w", encoding="utf-8") as handle:
        for doc in DOCS:
            handle.write(json.dumps(doc, ensure_ascii=False) + "\n")
    with open(DEMO / "fixtures.jsonl", "w", encoding="utf-8") as handle:
        for fixture in build_fixtures():
            handle.write(json.dumps(fixture, ensure_ascii=False) + "\n")
    with open(DEMO / "qa.jsonl", "w", encoding="utf-8") as handle:
        for qa in QA:
            row = {"question": qa["question"], "answers": qa["answers"]}
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
    config = {
        "gateway": {"mode": "stub", "fixtures": "fixtures.jsonl"},
    }
    with open(DEMO / "config.json", "w", encoding="utf-8") as handle:
        handle.write(json.dumps(config, indent=2) + "\n")
    print("demo files written to", DEMO)


if __name__ == "__main__":
    main()
