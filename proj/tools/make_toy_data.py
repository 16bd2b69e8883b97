#!/usr/bin/env python3
"""Generate the toy corpora, preset configs and golden-trace fixtures.

Everything is derived from a fixed seed, so rerunning the script reproduces
the checked-in files byte for byte.

    python3 tools/make_toy_data.py [--root .]
"""

import argparse
import json
import random
from pathlib import Path

SEED = 20240517

# --------------------------------------------------------------------------
# Taxonomies

NERD = {
    "art": ["broadcast program", "film", "music", "other art", "painting", "written art"],
    "building": ["airport", "hospital", "hotel", "library", "other building", "restaurant",
                 "sports facility", "theater"],
    "event": ["attack battle war military conflict", "disaster", "election", "other event",
              "protest", "sports event"],
    "location": ["gpe", "bodies of water", "island", "mountain", "other location", "park",
                 "road railway highway transit"],
    "organization": ["company", "education", "government agency", "media newspaper",
                     "other organization", "political party", "religion", "show organization",
                     "sports league", "sports team"],
    "other": ["astronomy thing", "award", "biology thing", "chemical thing", "currency", "disease",
              "educational degree", "god", "language", "law", "living thing", "medical"],
    "person": ["actor", "artist author", "athlete", "director", "other person", "politician",
               "scholar", "soldier"],
    "product": ["airplane", "car", "food", "game", "other product", "ship", "software", "train",
                "weapon"],
}

NYT = {
    "location": ["contains", "country", "administrative divisions", "capital", "neighborhood of",
                 "state capital"],
    "people": ["nationality", "place lived", "birth place", "place of death", "children",
               "ethnicity", "geographic distribution", "religion", "profession"],
    "business": ["company", "founders", "place founded", "major shareholder of",
                 "major shareholders", "advisors", "industry"],
    "sports": ["team location", "teams"],
}

ACE = {
    "life": ["be born", "marry", "divorce", "injure", "die"],
    "movement": ["transport"],
    "transaction": ["transfer ownership", "transfer money"],
    "business": ["start organization", "merge organization", "declare bankruptcy",
                 "end organization"],
    "conflict": ["attack", "demonstrate"],
    "contact": ["meet", "phone write"],
    "personnel": ["start position", "end position", "nominate", "elect"],
    "justice": ["arrest jail", "release parole", "trial hearing", "charge indict", "sue", "convict",
                "sentence", "fine", "execute", "extradite", "acquit", "appeal", "pardon"],
}

# "sentence" is left out of the role inventory: it is already an event type name.
ACE_ROLES = {
    "be born": ["person", "place", "time"],
    "marry": ["person", "place", "time"],
    "divorce": ["person", "place", "time"],
    "injure": ["agent", "victim", "instrument", "place"],
    "die": ["agent", "victim", "instrument", "place", "time"],
    "transport": ["agent", "artifact", "vehicle", "origin", "destination", "time"],
    "transfer ownership": ["buyer", "seller", "beneficiary", "artifact", "price", "place"],
    "transfer money": ["giver", "recipient", "beneficiary", "money", "place"],
    "start organization": ["agent", "org", "place"],
    "merge organization": ["org", "place"],
    "declare bankruptcy": ["org", "place"],
    "end organization": ["org", "place"],
    "attack": ["attacker", "target", "instrument", "place", "time"],
    "demonstrate": ["entity", "place"],
    "meet": ["entity", "place", "time"],
    "phone write": ["entity", "time"],
    "start position": ["person", "entity", "position", "place"],
    "end position": ["person", "entity", "position", "place", "time"],
    "nominate": ["person", "agent", "position"],
    "elect": ["person", "entity", "position", "place", "time"],
    "arrest jail": ["person", "agent", "crime", "place"],
    "release parole": ["person", "entity", "crime", "place"],
    "trial hearing": ["defendant", "prosecutor", "adjudicator", "crime", "place"],
    "charge indict": ["defendant", "prosecutor", "adjudicator", "crime"],
    "sue": ["plaintiff", "defendant", "adjudicator", "crime", "place"],
    "convict": ["defendant", "adjudicator", "crime", "place"],
    "sentence": ["defendant", "adjudicator", "crime", "place"],
    "fine": ["entity", "adjudicator", "money", "crime"],
    "execute": ["person", "agent", "crime", "place"],
    "extradite": ["agent", "person", "destination", "origin"],
    "acquit": ["defendant", "adjudicator", "crime"],
    "appeal": ["defendant", "prosecutor", "adjudicator", "crime"],
    "pardon": ["defendant", "adjudicator", "crime"],
}

# Single-word stand-ins used to seed the co-occurrence corpus. Several follow
# the renames in the analogous golden trace.
SYNONYMS = {
    "ace": {
        "be born": "birth", "marry": "wed", "divorce": "separate", "injure": "hurt",
        "die": "perish", "transport": "carry", "transfer ownership": "giveaway",
        "transfer money": "remittance", "start organization": "found",
        "merge organization": "amalgamate", "declare bankruptcy": "insolvency",
        "end organization": "dissolve", "attack": "assault", "demonstrate": "parade",
        "meet": "encounter", "phone write": "communication", "start position": "begin",
        "end position": "end", "nominate": "propose", "elect": "vote",
        "arrest jail": "detain", "release parole": "liberate", "trial hearing": "tribunal",
        "charge indict": "prosecute", "sue": "litigate", "convict": "condemned",
        "sentence": "condemn", "fine": "penalty", "execute": "behead", "extradite": "deport",
        "acquit": "exonerate", "appeal": "petition", "pardon": "amnesty",
    },
    "nyt": {
        "contains": "includes", "country": "nation", "administrative divisions": "provinces",
        "capital": "metropolis", "neighborhood of": "district", "state capital": "statehouse",
        "nationality": "citizenship", "place lived": "residence", "birth place": "hometown",
        "place of death": "deathbed", "children": "offspring", "ethnicity": "ancestry",
        "geographic distribution": "diaspora", "religion": "faith", "profession": "occupation",
        "company": "firm", "founders": "cofounders", "place founded": "birthplace",
        "major shareholder of": "stakeholder", "major shareholders": "investors",
        "advisors": "consultants", "industry": "sector", "team location": "venue",
        "teams": "squads",
    },
}

SYLLABLES = ["ka", "lo", "mi", "ra", "ve", "to", "su", "na", "di", "zo", "pe", "qu", "fa", "ne",
             "bi", "ho", "gu", "ye", "ci", "wa", "ju", "xe", "mo", "ta"]
FILLERS = ["the", "a", "of", "in", "on", "said", "was", "after", "with", "from", "by", "for",
           "near", "during", "while", "and", "reported", "today", "later", "also"]
CORPUS_FILLERS = ["morning", "report", "people", "city", "story", "week", "office", "street",
                  "paper", "news", "group", "night", "market", "road", "school", "house"]


def build_schema(task, taxonomy, primary, aux=None, ee_roles=None, constraints=None):
    nodes = [{"id": "root", "name": "root", "level": "root", "role": primary}]
    for mi, (major, subs) in enumerate(taxonomy.items()):
        mid = f"m{mi:02d}"
        nodes.append({"id": mid, "name": major, "parent": "root", "level": "major", "role": primary})
        for si, sub in enumerate(subs):
            nodes.append({"id": f"{mid}s{si:02d}", "name": sub, "parent": mid, "level": "sub",
                          "role": primary})
    for ai, (name, role) in enumerate(aux or []):
        nodes.append({"id": f"x{ai:02d}", "name": name, "parent": "root", "level": "major",
                      "role": role})
    schema = {"task": task, "nodes": nodes}
    if constraints is not None:
        schema["re_constraints"] = constraints
    if ee_roles is not None:
        schema["ee_roles"] = ee_roles
    schema["version"] = 0
    return schema


class Words:
    """Pseudo-word factory; no word is handed out twice."""

    def __init__(self, rng, taken):
        self.rng = rng
        self.taken = set(taken)

    def word(self, capital=True):
        while True:
            w = "".join(self.rng.choice(SYLLABLES) for _ in range(self.rng.randint(2, 3)))
            if capital:
                w = w.capitalize()
            if w.lower() not in self.taken:
                self.taken.add(w.lower())
                return w


def sentence_with_mentions(rng, words, n_mentions, mention_len=(1, 2)):
    """Returns (text, [(surface, start, end)]) with every token unique in the sentence."""
    pieces = []
    spans = []
    used_fillers = list(FILLERS)
    rng.shuffle(used_fillers)
    for k in range(n_mentions):
        if k:
            pieces.append(used_fillers.pop())
        toks = [words.word() for _ in range(rng.randint(*mention_len))]
        pieces.append(toks)
    pieces.insert(0, used_fillers.pop())
    pieces.append(used_fillers.pop())
    text = ""
    for p in pieces:
        surface = " ".join(p) if isinstance(p, list) else p
        if text:
            text += " "
        if isinstance(p, list):
            spans.append((surface, len(text), len(text) + len(surface)))
        text += surface
    return text + " .", spans


def mention(surface, start, end):
    return {"text": surface, "start": start, "end": end}


def locate(text, surface):
    i = text.index(surface)
    return mention(surface, i, i + len(surface))


def ner_examples(rng, words, prefix, n):
    subs = [s for subs in NERD.values() for s in subs]
    majors = list(NERD)
    out = []
    for i in range(n):
        k = rng.randint(1, 3)
        text, spans = sentence_with_mentions(rng, words, k)
        ents = []
        for surface, s, e in spans:
            label = rng.choice(majors) if rng.random() < 0.1 else rng.choice(subs)
            ents.append(dict(mention(surface, s, e), type=label))
        out.append({"id": f"{prefix}-{i:04d}", "text": text, "entities": ents})
    return out


def re_examples(rng, words, prefix, n):
    rels = [s for subs in NYT.values() for s in subs]
    out = []
    for i in range(n):
        k = rng.randint(1, 2)
        text, spans = sentence_with_mentions(rng, words, k + 1)
        triples = []
        for j in range(k):
            h, t = spans[j], spans[j + 1]
            if rng.random() < 0.5:
                h, t = t, h
            triples.append({"head": mention(*h), "head_type": "entity",
                            "relation": rng.choice(rels),
                            "tail": mention(*t), "tail_type": "entity"})
        out.append({"id": f"{prefix}-{i:04d}", "text": text, "relations": triples})
    return out


def ee_examples(rng, words, prefix, n):
    types = [s for subs in ACE.values() for s in subs]
    out = []
    for i in range(n):
        n_events = rng.randint(1, 2)
        n_args = [rng.randint(0, 2) for _ in range(n_events)]
        text, spans = sentence_with_mentions(rng, words, n_events + sum(n_args), (1, 1))
        events = []
        pos = 0
        for e in range(n_events):
            etype = rng.choice(types)
            trig = spans[pos]
            pos += 1
            args = []
            for _ in range(n_args[e]):
                args.append({"mention": mention(*spans[pos]), "role": rng.choice(ACE_ROLES[etype])})
                pos += 1
            events.append({"trigger": mention(*trig), "type": etype, "args": args})
        out.append({"id": f"{prefix}-{i:04d}", "text": text, "events": events})
    return out


# --------------------------------------------------------------------------
# Golden trace sentences and their per-iteration label lists

TRIAL_TEXT = ("The Belgrade district court said that Markovic will be tried along with 10 other "
               "Milosevic-era officials who face similar charges of ‘inappropriate use of state "
               "property’ that carry a sentence of up to five years in jail.")
VISIT_TEXT = ("Kelly, the US assistant secretary for East Asia and Pacific Affairs, arrived in Seoul "
               "from Beijing Friday to brief Yoon, the foreign minister.")
NAMED_TEXT = ("The charismatic leader of Turkey's governing party was named prime minister Tuesday, "
                "a step that probably boosts chances that the United States will get permission to "
                "deploy troops in the country along Iraq's northern border.")
BREAKUP_TEXT = ("Webb also said details of the breakdowns of the Welches' previous marriages were "
                "likely to come up , and cited reports of alleged extramarital affairs by both.")


def L(s):
    return [x.strip() for x in s.split(",")]


TRIAL = [
    L("attack, start position, transfer ownership, be born, sentence, die, arrest jail, transport, elect, phone write, end organization, sue, acquit, marry, extradite"),
    L("attack, start position, transfer ownership, be born, sentence, die, arrest jail, transport, elect, injure, phone write, fine, convict, end organization, sue, acquit, marry, extradite"),
    L("attack, start position, transfer money, transfer ownership, be born, sentence, die, demonstrate, arrest jail, transport, elect, injure, phone write, fine, convict, end organization, sue, acquit, execute, marry, extradite"),
    L("end position, attack, start position, transfer money, transfer ownership, be born, sentence, die, demonstrate, arrest jail, transport, elect, start organization, injure, phone write, fine, convict, end organization, sue, acquit, execute, marry, extradite, pardon"),
    L("end position, attack, start position, transfer money, transfer ownership, be born, sentence, die, demonstrate, arrest jail, transport, elect, start organization, injure, phone write, declare bankruptcy, trial hearing, fine, convict, end organization, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("end position, attack, start position, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, elect, start organization, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("end position, attack, start position, nominate, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, elect, start organization, meet, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, divorce, acquit, appeal, execute, marry, extradite, pardon"),
]
TRIAL_EXPECTED = [["sentence[sentence]"]] * 4 + [
    ["sentence[sentence]", "trial hearing[tried]"],
    ["sentence[sentence]", "trial hearing[tried]", "charge indict[charges]"],
    ["sentence[sentence]", "trial hearing[tried]", "charge indict[charges]"],
]

VISIT = [
    L("personnel, attack, justice, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, transport, business, contact, life, fine, sue, execute, marry, extradite, pardon"),
    L("personnel, attack, justice, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, transport, business, meet, life, contact, fine, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("personnel, attack, justice, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, transport, start organization, meet, life, contact, merge organization, business, trial hearing, fine, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("personnel, attack, justice, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, transport, start organization, meet, life, phone write, merge organization, declare bankruptcy, trial hearing, fine, end organization, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("personnel, attack, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, start organization, meet, life, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("end position, attack, personnel, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, start organization, meet, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, divorce, acquit, appeal, execute, marry, extradite, pardon"),
    L("end position, attack, start position, nominate, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, elect, start organization, meet, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, divorce, acquit, appeal, execute, marry, extradite, pardon"),
]
VISIT_EXPECTED = [["transport[arrived]", "contact[brief]"]] + [["transport[arrived]", "meet[brief]"]] * 6

NAMED = [
    L("attack, justice, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, transport, life, fine, sue, execute, marry, extradite, pardon"),
    L("attack, justice, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, transport, meet, life, contact, fine, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("attack, justice, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, transport, start organization, meet, life, contact, merge organization, business, trial hearing, fine, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("attack, justice, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, transport, start organization, meet, life, phone write, merge organization, declare bankruptcy, trial hearing, fine, end organization, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("attack, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, start organization, meet, life, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, acquit, appeal, execute, marry, extradite, pardon"),
    L("end position, attack, personnel, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, start organization, meet, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, divorce, acquit, appeal, execute, marry, extradite, pardon"),
    L("end position, attack, start position, nominate, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, elect, start organization, meet, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, divorce, acquit, appeal, execute, marry, extradite, pardon"),
]
NAMED_EXPECTED = [["transport[deploy]"]] * 5 + [["transport[deploy]", "personnel[named]"],
                                                   ["transport[deploy]", "elect[named]"]]

BREAKUP = [
    L("end position, attack, start position, nominate, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, transport, elect, start organization, meet, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, divorce, acquit, appeal, execute, marry, extradite, pardon"),
    L("end position, attack, begin, nominate, charge indict, transfer money, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, carry, elect, start organization, meet, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, separate, acquit, appeal, execute, marry, extradite, pardon"),
    L("end, attack, begin, nominate, prosecute, remittance, transfer ownership, release parole, be born, sentence, die, demonstrate, arrest jail, carry, elect, start organization, meet, injure, phone write, merge organization, declare bankruptcy, trial hearing, fine, convict, end organization, sue, separate, acquit, appeal, execute, marry, extradite, pardon"),
    L("end, attack, begin, nominate, prosecute, remittance, transfer ownership, release parole, be born, sentence, pass away, demonstrate, arrest jail, carry, elect, start organization, meet, injure, phone write, merge organization, declare bankruptcy, attend the trial, fine, convict, end organization, sue, separate, acquit, appeal, perform, marry, extradite, pardon"),
    L("end, attack, begin, nominate, prosecute, remittance, transfer ownership, release parole, be born, condemn, pass away, demonstrate, arrest jail, carry, elect, start organization, encounter, injure, phone write, merge organization, go out of business, attend the trial, fine, convict, end organization, sue, separate, acquit, appeal, perform, marry, extradite, pardon"),
    L("end, attack, begin, nominate, prosecute, remittance, giveaway, release parole, be born, condemn, pass away, parade, arrest jail, carry, vote, start organization, encounter, injure, phone write, merge organization, go out of business, attend the trial, fine, convict, end organization, sue, separate, acquit, appeal, perform, marry, extradite, pardon"),
    L("end, attack, begin, nominate, prosecute, remittance, giveaway, release parole, be born, condemn, pass away, parade, arrest jail, carry, vote, start organization, encounter, hurt, communication, merge organization, go out of business, attend the trial, fine, convict, end organization, sue, separate, acquit, appeal, perform, wed, extradite, pardon"),
]
BREAKUP_EXPECTED = [["divorce[breakdowns]", "marry[marriages]"]] + \
    [["separate[breakdowns]", "marry[marriages]"]] * 5 + [["separate[breakdowns]", "wed[marriages]"]]


def trace_events(text, pairs):
    return [{"trigger": locate(text, trig), "type": etype, "args": []} for etype, trig in pairs]


TRACE_GOLD = {
    "trial": (TRIAL_TEXT, [("sentence", "sentence"), ("trial hearing", "tried"),
                             ("charge indict", "charges")]),
    "visit": (VISIT_TEXT, [("transport", "arrived"), ("meet", "brief")]),
    "named": (NAMED_TEXT, [("elect", "named"), ("transport", "deploy")]),
    "breakup": (BREAKUP_TEXT, [("divorce", "breakdowns"), ("marry", "marriages")]),
}


def golden_traces():
    traces = []
    for name, strategy, lists, expected in [
        ("trial", "horizontal", TRIAL, TRIAL_EXPECTED),
        ("visit", "vertical", VISIT, VISIT_EXPECTED),
        ("named", "hybrid", NAMED, NAMED_EXPECTED),
    ]:
        text, pairs = TRACE_GOLD[name]
        traces.append({
            "name": name, "strategy": strategy, "text": text,
            "events": trace_events(text, pairs),
            "iterations": [{"i": i + 1, "labels": labels, "expected": exp}
                           for i, (labels, exp) in enumerate(zip(lists, expected))],
        })
    text, pairs = TRACE_GOLD["breakup"]
    first = BREAKUP[0]
    iterations = []
    for i, (labels, exp) in enumerate(zip(BREAKUP, BREAKUP_EXPECTED)):
        assert len(labels) == len(first), (i, len(labels))
        renames = {old: new for old, new in zip(first, labels) if old != new}
        iterations.append({"i": i + 1, "labels": labels, "renames": renames, "expected": exp})
    traces.append({"name": "breakup", "strategy": "analogous", "text": text,
                   "events": trace_events(text, pairs), "iterations": iterations})
    return {"traces": traces}


NYT_DEMOS = [
    ("In Queens , North Shore Towers , near the Nassau border , supplanted a golf course , and "
     "housing replaced a gravel quarry in Douglaston .",
     [("Douglaston", "neighborhood of", "Queens"), ("Queens", "contains", "Douglaston")]),
    ("Martin , the district attorney for Lehigh County in Pennsylvania , said that after his "
     "office 's review of the records , he was satisfied with Mr. Cullen 's denials .",
     [("Pennsylvania", "contains", "Lehigh County")]),
    ("Mr. Brown has demeaned Mr. Bush as \" a cheerleader , \" declared that Homeland Security "
     "Secretary Michael Chertoff did not know \" the first thing about running a disaster , \" and "
     "called critics like Representative Gene Taylor , Democrat of Mississippi , \" a little "
     "twerp \" and Senator Norm Coleman , Republican of Minnesota , an unprintable vulgarity "
     "(both in Playboy) .",
     [("Gene Taylor", "place lived", "Mississippi")]),
]
NYT_QUERY = ("But that spasm of irritation by a master intimidator was minor compared with what "
             "Bobby Fischer , the erratic former world chess champion , dished out in March at a "
             "news conference in Reykjavik , Iceland .")
NYT_QUERY_GOLD = [("Bobby Fischer", "nationality", "Iceland"), ("Iceland", "capital", "Reykjavik"),
                  ("Iceland", "contains", "Reykjavik"), ("Bobby Fischer", "place of death", "Reykjavik")]


def nyt_fixed_example(ex_id, text, triples):
    rels = [{"head": locate(text, h), "head_type": "entity", "relation": r,
             "tail": locate(text, t), "tail_type": "entity"} for h, r, t in triples]
    return {"id": ex_id, "text": text, "relations": rels}


# --------------------------------------------------------------------------
# Embeddings and corpus

def embeddings(rng, taxonomy, dim=12):
    centers = {m: [rng.gauss(0, 1) for _ in range(dim)] for m in taxonomy}
    owners = {}
    for major, subs in taxonomy.items():
        for tok in major.split():
            owners.setdefault(tok, []).append(major)
        for sub in subs:
            for tok in sub.split():
                owners.setdefault(tok, []).append(major)
    lines = []
    for tok in sorted(owners):
        ms = owners[tok]
        vec = [sum(centers[m][d] for m in ms) / len(ms) + rng.gauss(0, 0.35) for d in range(dim)]
        lines.append(tok + " " + " ".join(f"{v:.6f}" for v in vec))
    return f"{len(lines)} {dim}\n" + "\n".join(lines) + "\n"


def corpus(rng, taxonomy, synonyms, per_node=6):
    lines = []
    for subs in taxonomy.values():
        for sub in subs:
            syn = synonyms.get(sub)
            for _ in range(per_node):
                fill = rng.sample(CORPUS_FILLERS, 4)
                body = fill[:2] + sub.split() + ([syn] if syn else []) + fill[2:]
                lines.append(" ".join(body))
    for _ in range(len(lines) // 2):
        lines.append(" ".join(rng.sample(CORPUS_FILLERS, 6)))
    rng.shuffle(lines)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------

def dump_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")


def dump_json(path, obj):
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def reserved_words(*taxonomies):
    taken = set(FILLERS) | set(CORPUS_FILLERS)
    for tax in taxonomies:
        for major, subs in tax.items():
            taken |= set(major.split())
            for s in subs:
                taken |= set(s.split())
    return taken


PRESETS = {
    # dataset: (task, #Init, #Add, #N, analogous n_iter)
    "nerd": ("NER", 30, 6, 7, 6),
    "nyt": ("RE", 10, 2, 8, 2),
    "ace": ("EE", 15, 3, 7, 3),
}


def write_configs(root):
    cfg_dir = root / "configs"
    cfg_dir.mkdir(parents=True, exist_ok=True)
    for ds, (task, n_init, n_add, n_total, n_ana) in PRESETS.items():
        for tag, strategy in [("h", "horizontal"), ("v", "vertical"), ("x", "hybrid"),
                              ("a", "analogous")]:
            evo = {"strategy": strategy, "seed": 42}
            if strategy == "analogous":
                evo.update({"iterations": 7, "n_iter": n_ana, "window": 5,
                            "analogous_threshold": 0.3, "eps": 1e-12, "gamma": 1.0})
            else:
                evo.update({"iterations": n_total, "n_init": n_init, "n_iter": n_add})
                if strategy == "hybrid":
                    evo["alpha"] = 0.5
            cfg = {
                "raw_schema": f"../data/toy/{ds}/raw_schema.json",
                "train": f"../data/toy/{ds}/train.jsonl",
                "dev": f"../data/toy/{ds}/dev.jsonl",
                "test": f"../data/toy/{ds}/test.jsonl",
                "output_dir": f"../out/{ds}-{tag}",
                "evolution": evo,
                "decode": {"scorer": "oracle", "max_len": 256, "threads": 1},
                "metrics": {"NER": ["entity"], "RE": ["rel_strict"],
                            "EE": ["event_trigger", "event_argument"]}[task],
            }
            if strategy in ("horizontal", "hybrid"):
                cfg["embeddings"] = f"../data/toy/{ds}/embeddings.txt"
            if strategy == "analogous":
                cfg["corpus"] = f"../data/toy/{ds}/corpus.txt"
            if ds == "nyt":
                cfg["endpoint"] = {"base_url": "https://api.openai.com", "model": "gpt-3.5-turbo",
                                   "token_env": "OPENAI_API_KEY", "max_retries": 3,
                                   "max_concurrency": 4}
            dump_json(cfg_dir / f"{ds}-{tag}.json", cfg)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--root", default=str(Path(__file__).resolve().parent.parent))
    args = ap.parse_args()
    root = Path(args.root)
    rng = random.Random(SEED)
    taken = reserved_words(NERD, NYT, ACE)
    for syns in SYNONYMS.values():
        taken |= set(syns.values())
    words = Words(rng, taken)

    # NERD
    d = root / "data/toy/nerd"
    d.mkdir(parents=True, exist_ok=True)
    dump_json(d / "raw_schema.json", build_schema("NER", NERD, "entity-type"))
    dump_jsonl(d / "train.jsonl", ner_examples(rng, words, "nerd-train", 300))
    dump_jsonl(d / "dev.jsonl", ner_examples(rng, words, "nerd-dev", 100))
    dump_jsonl(d / "test.jsonl", ner_examples(rng, words, "nerd-test", 100))
    (d / "embeddings.txt").write_text(embeddings(rng, NERD), encoding="utf-8")
    (d / "corpus.txt").write_text(corpus(rng, NERD, {}), encoding="utf-8")

    # NYT: relations evolve; the single entity type "entity" is auxiliary.
    d = root / "data/toy/nyt"
    d.mkdir(parents=True, exist_ok=True)
    constraints = [["entity", r, "entity"] for subs in NYT.values() for r in subs]
    dump_json(d / "raw_schema.json",
              build_schema("RE", NYT, "relation", aux=[("entity", "entity-type")],
                           constraints=constraints))
    train = re_examples(rng, words, "nyt-train", 200)
    train += [nyt_fixed_example(f"nyt-demo-{i}", t, g) for i, (t, g) in enumerate(NYT_DEMOS)]
    dump_jsonl(d / "train.jsonl", train)
    dump_jsonl(d / "dev.jsonl", re_examples(rng, words, "nyt-dev", 60))
    test = re_examples(rng, words, "nyt-test", 60)
    test.append(nyt_fixed_example("nyt-query-0", NYT_QUERY, NYT_QUERY_GOLD))
    dump_jsonl(d / "test.jsonl", test)
    (d / "embeddings.txt").write_text(embeddings(rng, NYT), encoding="utf-8")
    (d / "corpus.txt").write_text(corpus(rng, NYT, SYNONYMS["nyt"]), encoding="utf-8")

    # ACE
    d = root / "data/toy/ace"
    d.mkdir(parents=True, exist_ok=True)
    roles = sorted({r for rs in ACE_ROLES.values() for r in rs})
    dump_json(d / "raw_schema.json",
              build_schema("EE", ACE, "event-type", aux=[(r, "arg-role") for r in roles],
                           ee_roles=ACE_ROLES))
    dump_jsonl(d / "train.jsonl", ee_examples(rng, words, "ace-train", 200))
    dump_jsonl(d / "dev.jsonl", ee_examples(rng, words, "ace-dev", 60))
    test = ee_examples(rng, words, "ace-test", 60)
    for name, (text, pairs) in TRACE_GOLD.items():
        test.append({"id": f"ace-{name}", "text": text, "events": trace_events(text, pairs)})
    dump_jsonl(d / "test.jsonl", test)
    (d / "embeddings.txt").write_text(embeddings(rng, ACE), encoding="utf-8")
    (d / "corpus.txt").write_text(corpus(rng, ACE, SYNONYMS["ace"]), encoding="utf-8")

    fixtures = root / "tests/fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    dump_json(fixtures / "golden_traces.json", golden_traces())
    write_configs(root)


if __name__ == "__main__":
    main()
