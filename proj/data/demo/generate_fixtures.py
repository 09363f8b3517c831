#!/usr/bin/env python3
"""Regenerates the hand-scripted demo fixtures in this directory.

Outputs:
  dataset.jsonl        20 QA records over three scenes
  script.jsonl         substring-matched LLM transcript (compression, classification, code generation)
  script_allwrong.jsonl  same, but every classification answer is a wrong type
  exec_stub.jsonl      recorded sandbox responses keyed by program digest and scene
  scenes/*.json        scene fixtures for the external sandbox

The exact-hash transcript (transcript.jsonl) is recorded from script.jsonl by
running the CLI with --record; see README.md.
"""
import hashlib
import json
import os
import re

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.dirname(HERE)


def read(*parts):
    with open(os.path.join(*parts), encoding="utf-8") as f:
        return f.read()


def extract_code(response):
    """Largest fenced block, else the whole response (mirrors the C++ extractor)."""
    blocks = []
    lines = response.split("\n")
    i = 0
    while i < len(lines):
        if lines[i].lstrip().startswith("```"):
            j = i + 1
            body = []
            while j < len(lines) and not lines[j].lstrip().startswith("```"):
                body.append(lines[j] + "\n")
                j += 1
            if j < len(lines):
                blocks.append("".join(body))
                i = j + 1
                continue
        i += 1
    if not blocks:
        return response
    best = blocks[0]
    for b in blocks[1:]:
        if len(b) > len(best):
            best = b
    return best


CATALOG = json.loads(read(DATA, "catalogs", "gqa.json"))["types"]
TYPE_DEF = {t["name"]: t["definition"] for t in CATALOG}
TYPE_MARKER = {
    "obj": "# Is there a foo in the image?",
    "cat": "# What kind of animal is the foo?",
    "attr": "# What color is the foo?",
    "rel": "# Is the foo to the left of the bar?",
    "global": "# Is it raining?",
}
ORIGINAL_MARKER = "# Who invented this object?"
# Example questions quoted in the type definitions, with scripted replies.
CATALOG_EXAMPLES = [
    ("Is it foo?", "global"),
    ("What is the color of bar?", " Attr.\n"),
    ("What is the foo next to the baz wearing?", "rel"),
]

# id, question, scene, gold answer, gold type, predicted type, good program body,
# (good status, good answer), (weak answer, weak trace)
RECORDS = [
    ("q01", "Is there a cat in the picture?", "living_room", "yes", "obj", "obj",
     'return bool_to_yesno(image_patch.exists("cat"))', None, ("Yes, there is a cat on the blanket", [])),
    ("q02", "Are there any dogs?", "living_room", "no", "obj", "cat",
     'return bool_to_yesno(image_patch.exists("dog"))', None,
     ("yes", [{"name": "find", "args": "'dog'", "result": "[]"}])),
    ("q03", "Is there a blanket or a pillow?", "living_room", "yes", "obj", "obj",
     'return bool_to_yesno(image_patch.exists("blanket") or image_patch.exists("pillow"))', None, ("no", [])),
    ("q04", "Are there both cups and plates in the photo?", "street_cafe", "no", "obj", "obj",
     'return bool_to_yesno(image_patch.exists("cup") and image_patch.exists("plate"))', None, ("yes", [])),
    ("q05", "What animal is on the blanket?", "living_room", "cat", "cat", "cat",
     'blanket_patch = image_patch.find("blanket")[0]\n'
     '    animal_patches = image_patch.find("animal")\n'
     '    animal_patches.sort(key=lambda a: distance(a, blanket_patch))\n'
     '    return animal_patches[0].simple_query("What animal is this?")', None, ("dog", [])),
    ("q06", "What kind of furniture is to the left of the lamp?", "living_room", "sofa", "cat", "cat",
     'lamp_patch = image_patch.find("lamp")[0]\n'
     '    left_part = image_patch.crop(0, 0, int(lamp_patch.horizontal_center), image_patch.upper)\n'
     '    return left_part.simple_query("What type of furniture is this?")', None, ("chair", [])),
    ("q07", "Which vehicle is this?", "street_cafe", "bus", "cat", "cat",
     'return image_patch.best_text_match(["car", "bus", "truck", "bicycle"])', ("coding_error", None),
     ("car", [])),
    ("q08", "What type of fruit is on the table?", "street_cafe", "apple", "cat", "cat",
     'table_patch = image_patch.find("table")[0]\n'
     '    fruit_patches = image_patch.find("fruit")\n'
     '    fruit_patches.sort(key=lambda f: distance(f, table_patch))\n'
     '    return fruit_patches[0].simple_query("What fruit is this?")', None, ("an apple", [])),
    ("q09", "What color is the blanket?", "living_room", "blue", "attr", "attr",
     'blanket_patch = image_patch.find("blanket")[0]\n'
     '    return blanket_patch.simple_query("What color is this?")', None, ("green", [])),
    ("q10", "Is the cup white or black?", "street_cafe", "white", "attr", "attr",
     'cup_patch = image_patch.find("cup")[0]\n'
     '    return cup_patch.best_text_match(["white", "black"])', None, ("black", [])),
    ("q11", "On which side of the image is the lamp?", "living_room", "right", "attr", "attr",
     'lamp_patch = image_patch.find("lamp")[0]\n'
     '    if lamp_patch.horizontal_center < image_patch.horizontal_center:\n'
     '        return "left"\n'
     '    return "right"', None, ("left", [])),
    ("q12", "What material is the table made of?", "street_cafe", "wood", "attr", "attr",
     'table_patch = image_patch.find("table")[0]\n'
     '    return table_patch.best_text_match(["wood", "metal", "plastic", "glass"])', None, ("metal", [])),
    ("q13", "Is the blanket to the right of the cat?", "living_room", "no", "rel", "rel",
     'blanket_patch = image_patch.find("blanket")[0]\n'
     '    cat_patch = image_patch.find("cat")[0]\n'
     '    return bool_to_yesno(blanket_patch.horizontal_center > cat_patch.horizontal_center)', None,
     ("yes", [])),
    ("q14", "What is the man next to the bus wearing?", "street_cafe", "jacket", "rel", "rel",
     'bus_patch = image_patch.find("bus")[0]\n'
     '    man_patches = image_patch.find("man")\n'
     '    man_patches.sort(key=lambda man: distance(man, bus_patch))\n'
     '    return man_patches[0].simple_query("What is this person wearing?")', None, ("a jacket", [])),
    ("q15", "Is the cat lying on the blanket?", "living_room", "yes", "rel", "rel",
     'cat_patch = image_patch.find("cat")[0]\n'
     '    blanket_patch = image_patch.find("blanket")[0]\n'
     '    return bool_to_yesno(cat_patch.overlaps_with(blanket_patch.left, blanket_patch.lower, '
     'blanket_patch.right, blanket_patch.upper))', None, ("no", [])),
    ("q16", "What is on the sofa?", "living_room", "pillow", "rel", "attr",
     'sofa_patch = image_patch.find("sofa")[0]\n'
     '    return sofa_patch.simple_query("What is on the sofa?")', None, ("cushion", [])),
    ("q17", "Is it sunny?", "street_cafe", "yes", "global", "global",
     'return bool_to_yesno(image_patch.verify_property("sky", "sunny"))', None, ("no", [])),
    ("q18", "Is it indoors or outdoors?", "living_room", "indoors", "global", "global",
     'return image_patch.best_text_match(["indoors", "outdoors"])', None, ("outdoors", [])),
    ("q19", "What room is this?", "living_room", "living room", "global", "global",
     'return image_patch.simple_query("What room is this?")', ("ok", "I cannot answer"),
     ("kitchen", [])),
    ("q20", "Is it night?", "street_cafe", "no", "global", "global",
     'return bool_to_yesno(image_patch.verify_property("sky", "dark"))', None, ("yes", [])),
]


def program(body, tag):
    return ("```python\n"
            f"def execute_command(image) -> str:\n"
            f"    # {tag}\n"
            f"    image_patch = ImagePatch(image)\n"
            f"    {body}\n"
            "```\n")


def weak_program(question):
    return program(f'return image_patch.simple_query("{question}")', "direct query")


def main():
    os.makedirs(os.path.join(HERE, "scenes"), exist_ok=True)
    resp = lambda name: read(HERE, "responses", name)

    with open(os.path.join(HERE, "dataset.jsonl"), "w", encoding="utf-8") as f:
        for r in RECORDS:
            f.write(json.dumps({"id": r[0], "question": r[1], "scene": r[2], "answer": r[3], "type": r[4]}) + "\n")

    def transcript(path, predicted):
        entries = []
        entries.append({"contains": ["Rewrite the API definitions above"], "response": resp("compressed_defs.md")})
        for t in CATALOG:
            entries.append({"contains": ["Write three or four short example code snippets", t["definition"]],
                            "response": resp(f"snippets_{t['name']}.md")})
        entries.append({"contains": ["Write three or four short example code snippets"],
                        "response": resp("snippets_generic.md")})
        for r, p in zip(RECORDS, predicted):
            entries.append({"contains": ["Classify the question below", "\n" + r[1]], "response": p})
        for q, answer in CATALOG_EXAMPLES:
            entries.append({"contains": ["Classify the question below", "Question:\n" + q], "response": answer})
        for r in RECORDS:
            good = program(r[6], "plan for " + r[4])
            entries.append({"contains": [TYPE_MARKER[r[4]], "\n" + r[1]], "response": good})
            entries.append({"contains": [ORIGINAL_MARKER, "\n" + r[1]], "response": good})
            entries.append({"contains": ["\n" + r[1]], "response": weak_program(r[1])})
        with open(path, "w", encoding="utf-8") as f:
            for e in entries:
                e["repeat"] = True
                f.write(json.dumps(e) + "\n")

    names = [t["name"] for t in CATALOG]
    transcript(os.path.join(HERE, "script.jsonl"), [r[5] for r in RECORDS])
    wrong = [names[(names.index(r[4]) + 1) % len(names)] for r in RECORDS]
    transcript(os.path.join(HERE, "script_allwrong.jsonl"), wrong)

    with open(os.path.join(HERE, "exec_stub.jsonl"), "w", encoding="utf-8") as f:
        for r in RECORDS:
            good = extract_code(program(r[6], "plan for " + r[4]))
            status, answer = r[7] if r[7] else ("ok", r[3])
            resp_good = {"status": status, "trace": []}
            if status == "ok":
                resp_good["answer"] = answer
            weak = extract_code(weak_program(r[1]))
            weak_answer, weak_trace = r[8]
            for code, response in ((good, resp_good),
                                   (weak, {"status": "ok", "answer": weak_answer, "trace": weak_trace})):
                f.write(json.dumps({"program_sha256": hashlib.sha256(code.encode()).hexdigest(),
                                    "scene": r[2], "response": response}) + "\n")

    scenes = {
        "living_room": {
            "scene_id": "living_room", "width": 640, "height": 480,
            "objects": [
                {"name": "cat", "bbox": [300, 120, 380, 190], "attributes": {"color": "orange"}, "depth": 2.1},
                {"name": "blanket", "bbox": [260, 100, 420, 170], "attributes": {"color": "blue"}, "depth": 2.2},
                {"name": "sofa", "bbox": [40, 80, 460, 300], "attributes": {"color": "gray"}, "depth": 2.5},
                {"name": "pillow", "bbox": [60, 200, 140, 260], "attributes": {"color": "white"}, "depth": 2.4},
                {"name": "lamp", "bbox": [500, 60, 560, 360], "attributes": {"color": "black"}, "depth": 3.0},
            ],
            "query_overrides": {"What room is this?": "living room"},
            "global_facts": {"place": "indoors", "weather": "unknown"},
        },
        "street_cafe": {
            "scene_id": "street_cafe", "width": 800, "height": 600,
            "objects": [
                {"name": "bus", "bbox": [20, 100, 380, 400], "attributes": {"color": "red"}, "depth": 8.0},
                {"name": "man", "bbox": [400, 60, 470, 330], "attributes": {"clothing": "jacket"}, "depth": 4.0},
                {"name": "table", "bbox": [500, 40, 760, 160], "attributes": {"material": "wood"}, "depth": 3.0},
                {"name": "cup", "bbox": [560, 160, 600, 200], "attributes": {"color": "white"}, "depth": 3.0},
                {"name": "apple", "bbox": [640, 160, 670, 190], "attributes": {"color": "red"}, "depth": 3.1},
                {"name": "sky", "bbox": [0, 450, 800, 600], "attributes": {"weather": "sunny"}, "depth": 100.0},
            ],
            "query_overrides": {},
            "global_facts": {"place": "outdoors", "weather": "sunny", "time": "day"},
        },
        "kitchen": {
            "scene_id": "kitchen", "width": 320, "height": 240,
            "objects": [
                {"name": "plate", "bbox": [10, 10, 60, 40], "attributes": {"color": "white"}, "depth": 1.0},
            ],
            "query_overrides": {},
            "global_facts": {"place": "indoors"},
        },
    }
    for sid, scene in scenes.items():
        with open(os.path.join(HERE, "scenes", sid + ".json"), "w", encoding="utf-8") as f:
            json.dump(scene, f, indent=2)
            f.write("\n")


if __name__ == "__main__":
    main()
