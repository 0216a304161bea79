#!/usr/bin/env python3
"""Generate the small word-vector lexicon used by tests and the demo app.

Words that share a concept get vectors built around the same random
direction, so synonyms ("create"/"add") land close together while unrelated
words stay near-orthogonal. The output uses the common text layout for
pretrained vectors: a "count dimension" header, then "word v1 ... vD".

    python3 gen_lexicon.py > lexicon.vec
"""

import numpy as np

DIM = 50
SEED = 20211
NOISE = 0.45

CONCEPTS = [
    ["add", "create", "new", "insert", "plus", "make"],
    ["save", "store", "confirm", "done", "apply", "keep"],
    ["button", "btn", "icon", "key"],
    ["element", "widget", "control", "component", "item"],
    ["menu", "option", "overflow", "action", "actions"],
    ["field", "box", "input", "edit", "textbox"],
    ["text", "string", "wording", "characters"],
    ["account", "accounts", "ledger", "book"],
    ["transaction", "transactions", "payment", "entry", "expense"],
    ["name", "title", "label", "caption"],
    ["description", "memo", "note", "details", "comment"],
    ["amount", "value", "sum", "price", "total", "balance"],
    ["withdrawal", "debit", "withdraw", "spending"],
    ["deposit", "credit", "income", "refund"],
    ["toggle", "switch", "checkbox", "check", "flag"],
    ["delete", "remove", "erase", "trash", "discard"],
    ["navigate", "back", "return", "previous", "home"],
    ["settings", "preferences", "configuration", "setup"],
    ["theme", "dark", "appearance", "color", "style"],
    ["export", "share", "backup", "send", "upload"],
    ["list", "listview", "rows", "table", "records"],
    ["click", "tap", "press", "touch", "hit"],
    ["type", "enter", "write", "fill"],
    ["scroll", "swipe", "fling"],
    ["rotate", "turn", "orientation", "landscape", "portrait"],
    ["screen", "page", "view", "window", "activity", "dialog"],
    ["open", "launch", "show", "display"],
    ["close", "dismiss", "cancel", "exit"],
    ["search", "find", "filter", "query"],
    ["date", "day", "calendar", "time"],
    ["category", "group", "folder", "tag"],
    ["currency", "dollar", "euro", "money", "cash"],
    ["report", "summary", "chart", "graph"],
    ["import", "load", "restore", "download"],
    ["login", "password", "user", "username", "sign"],
    ["email", "mail", "message", "inbox"],
    ["photo", "image", "picture", "camera"],
    ["play", "music", "song", "audio"],
    ["map", "location", "place", "address"],
    ["help", "support", "faq", "about"],
    ["notification", "alert", "reminder", "alarm"],
]

FILLER = """
apple river mountain yellow purple green blue orange window
garden kitchen bottle pencil paper table chair door floor wall
cloud rain snow storm wind sun moon star planet ocean
forest desert island bridge tower castle village city street road
train plane boat car bicycle truck engine wheel motor fuel
doctor teacher farmer artist singer writer driver pilot lawyer nurse
happy angry quiet loud fast slow early late bright soft
coffee bread cheese butter sugar salt pepper honey lemon grape
horse tiger rabbit eagle salmon whale spider turtle monkey zebra
silver golden wooden glass stone metal plastic cotton leather wool
winter summer spring autumn morning evening night noon week month
violin guitar piano drum flute candle lamp mirror carpet pillow
""".split()


def main():
    rng = np.random.default_rng(SEED)
    words = []
    vecs = []
    for group in CONCEPTS:
        centre = rng.standard_normal(DIM)
        centre /= np.linalg.norm(centre)
        for w in group:
            noise = rng.standard_normal(DIM) / np.sqrt(DIM)
            v = centre + NOISE * noise
            words.append(w)
            vecs.append(v / np.linalg.norm(v))
    for w in FILLER:
        if w in words:
            continue
        v = rng.standard_normal(DIM)
        words.append(w)
        vecs.append(v / np.linalg.norm(v))
    words = words[:300]
    vecs = vecs[:300]
    assert len(words) == 300, len(words)
    assert len(set(words)) == 300
    print(f"{len(words)} {DIM}")
    for w, v in zip(words, vecs):
        print(w + " " + " ".join(f"{x:.6f}" for x in v))


if __name__ == "__main__":
    main()
