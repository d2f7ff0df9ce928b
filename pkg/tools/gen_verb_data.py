"""Regenerate the bundled verb data files.

Writes, under src/declarith/data/:
  verb_lexicon.txt    inflected forms of the core word-problem verbs
  verb_embeddings.tsv 50-dim unit vectors for a larger verb vocabulary

The embedding table is synthetic but geometrically meaningful: verbs are
organized into fine-grained semantic groups, each group gets a random
unit center, and every verb (and inflected form) is placed near its
group center.  Cosine neighborhoods therefore reflect the curated
semantics, which is what nearest-seed classification needs.  Everything
is seeded, so reruns are byte-identical.
"""

from __future__ import annotations

import pathlib
import zlib

import numpy as np

DIM = 50
VERB_NOISE = 0.05  # per-coordinate; norm ~0.35 against unit centers
FORM_NOISE = 0.02

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "src" / "declarith" / "data"

# Core groups: these drive the five verb classes used by transfer rules.
CORE_GROUPS = {
    "state_have": [
        "have", "own", "possess", "hold", "keep", "contain", "belong",
        "remain", "stay", "weigh", "be", "store", "retain",
    ],
    "get_receive": ["get", "receive", "acquire", "obtain", "gain", "accept", "inherit", "add"],
    "get_collect": [
        "collect", "gather", "pick", "find", "discover", "catch", "grab",
        "take", "steal", "save",
    ],
    "get_buy": ["buy", "purchase", "rent", "borrow"],
    "get_win": ["win", "earn", "score"],
    "give_transfer": [
        "give", "hand", "lend", "loan", "donate", "grant", "offer", "pass",
        "share", "feed", "distribute", "award",
    ],
    "give_send": ["send", "mail", "ship", "deliver", "return", "serve"],
    "give_sell": ["sell", "trade"],
    "give_pay": ["pay"],
    "give_lose": ["lose", "misplace"],
    "construct_make": [
        "make", "build", "construct", "create", "assemble", "produce",
        "form", "manufacture", "prepare",
    ],
    "construct_cook": ["bake", "cook", "brew", "fry", "roast"],
    "construct_grow": ["plant", "grow", "raise"],
    "construct_fill": ["fill", "pack", "load", "stack", "pour"],
    "construct_write": ["write", "draw", "paint", "print", "sew", "knit", "carve"],
    "destroy_consume": ["eat", "drink", "devour", "consume", "chew", "swallow", "nibble", "munch"],
    "destroy_use": ["use", "spend", "burn", "waste", "exhaust"],
    "destroy_damage": [
        "destroy", "break", "smash", "crush", "tear", "rip", "ruin",
        "wreck", "demolish", "shatter", "cut",
    ],
    "destroy_remove": ["remove", "erase", "discard", "dump", "delete"],
}

# Everyday verbs: kept in the lexicon so sentences parse, classified to
# whatever transfer class their neighborhood lands on (same as any
# distributional embedding would do).
EXTRA_LEXICON_GROUPS = {
    "motion": [
        "go", "walk", "run", "jump", "fly", "swim", "drive", "ride",
        "travel", "move", "come", "arrive", "leave", "climb", "throw",
        "toss", "kick", "carry", "bring", "push", "pull", "drop", "lift",
        "chase", "follow", "cross", "fall",
    ],
    "communication": [
        "say", "tell", "ask", "answer", "call", "read", "sing", "shout",
        "explain", "describe", "report", "reply", "count", "solve",
    ],
    "cognition": [
        "think", "know", "remember", "forget", "learn", "study", "plan",
        "guess", "decide", "measure", "check", "compare", "arrange",
        "organize",
    ],
    "perception": ["see", "look", "watch", "hear", "listen", "notice", "taste", "smell"],
    "emotion": ["want", "need", "like", "love", "enjoy", "hope", "wish", "miss"],
    "activity": [
        "play", "work", "sleep", "rest", "sit", "stand", "wait", "help",
        "visit", "meet", "start", "begin", "finish", "end", "stop",
        "open", "close", "wash", "clean", "practice", "cost", "do",
        "put", "place", "set", "wrap", "tie", "fold", "hang", "plan",
        "use2",
    ],
}

# Broader vocabulary that only needs embeddings (classification coverage).
GENERAL_VERBS = """
abandon admire admit advise agree allow annoy appear applaud appreciate
approach argue attack attempt attend attract avoid bark bathe battle beg
behave blink boast boil bounce bow brake breathe burst bury buzz
calculate cheer chop clap collapse comb command communicate compete
complain complete concentrate confess confuse connect consider contrast
cough cover crawl crush2 cry curl cycle damage dare decorate delay
deliver2 depend dig disagree disappear disturb dive divide double doubt
drag dream dress drown dry earnest educate embarrass employ empty
encourage entertain escape examine excite excuse exercise expand expect
experiment explore express extend face fade fasten fear fetch film fit
flash float flood flow fold2 force fry2 gaze glow greet grin guard
handle happen harm hate heal heat hop hug hunt hurry identify ignore
imagine impress improve include increase inform injure intend interest
interrupt introduce invent invite irritate itch join joke judge juggle
kneel knock label land last laugh launch lick lie lock long march mark
marry match matter melt mend mix moan mourn multiply murmur nail name
object observe obtain2 occur offend operate order overflow owe pack2
paddle pardon paste pat pause peck pedal peel perform permit pinch
pine pitch pledge polish ponder pop possess2 post pounce pound practice2
pray preach prefer present preserve press pretend prevent prick promise
protect provide pump punch punish push2 question race reach realize
recognize record reduce reflect refuse regret reject relax release rely
remind repair repeat replace request rescue retire rhyme rinse risk rob
rock rot rub rule rush sail satisfy scare scatter scold scrape scratch
scream screw seal search separate settle shade shave shelter shiver
shock shrug sigh signal sip ski slam slap slide slip smile snatch
sneeze sniff snore soak soothe spark sparkle spell spill spoil sprout
squeak squeal squeeze stamp stare steer stitch strap strengthen stretch
strip stroke stuff subtract succeed suck suffer suggest suit supply
support suppose surprise surround suspect swell tame tap tease telephone
tempt terrify thank thaw tickle tip tire touch tour trace train
transport travel2 treat tremble trick trip trot trouble trust try tug
tumble twist type unite unlock unpack untidy vanish visit2 wail wander
warm warn wave weaken whine whip whirl whisper whistle wink wipe wobble
wonder worry wreck2 yawn yell zoom
accompany accuse ache achieve act adapt adjust adopt advance afford aim
alert amaze amuse analyze anchor announce anticipate apologize appoint
approve arrest arrive2 assign assist assume assure astonish attach
authorize awaken balance ban bang beam beat behold belong2 bet bid bind
blast bleed bless blot blush board bolt bomb book boost borrow2 bother
box brag braid breed bribe brighten broadcast bruise brush bubble buckle
budge bump bundle burrow bust calm capture care carve2 cast cause cease
celebrate challenge change charge chart cheat chide chill chip choke
chuckle churn circle claim classify clause2 clear click cling clink clip
cloak clog clutch coach coast coil coincide collide color comfort
commend commit compose compute conceal concede conclude condemn conduct
confide confirm confront congratulate conquer consent conserve consist
console consult contain2 continue contribute convert convince cope copy
correct crack cram crash credit creep crumble crunch cuddle cure curve
dab dangle dart dash dazzle deafen debate decay deceive declare decrease
dedicate defeat defend define deflate degrade demand denounce deny
depart deposit derive deserve design desire despise detect determine
devise devote dictate differ dine dip direct disapprove discount
discourage dismiss dispatch display dispose dispute dissolve distract
distress disturb2 dodge dominate donate2 doze draft drain dread drift
drill drip drum duck dwell earn2 ease echo edit eject elect elevate
embrace emerge emit enable enclose endure enforce engage engrave enlarge
enlist enrich enroll ensure entertain2 entitle envy equip erupt
establish esteem estimate evade evaporate exceed exchange exclaim
exclude exhale exhibit exist expel experience expire explode export
expose
"""

IRREGULAR = {
    "be": {"forms": ["is", "are", "was", "were", "been", "being", "am"]},
    "have": {"3sg": "has", "past": "had"},
    "get": {"past": "got", "part": "gotten"},
    "give": {"past": "gave", "part": "given"},
    "take": {"past": "took", "part": "taken"},
    "find": {"past": "found"},
    "win": {"past": "won"},
    "buy": {"past": "bought"},
    "catch": {"past": "caught"},
    "steal": {"past": "stole", "part": "stolen"},
    "hold": {"past": "held"},
    "keep": {"past": "kept"},
    "lose": {"past": "lost"},
    "lend": {"past": "lent"},
    "send": {"past": "sent"},
    "sell": {"past": "sold"},
    "pay": {"past": "paid"},
    "make": {"past": "made"},
    "build": {"past": "built"},
    "draw": {"past": "drew", "part": "drawn"},
    "write": {"past": "wrote", "part": "written"},
    "eat": {"past": "ate", "part": "eaten"},
    "drink": {"past": "drank", "part": "drunk"},
    "break": {"past": "broke", "part": "broken"},
    "tear": {"past": "tore", "part": "torn"},
    "cut": {"past": "cut"},
    "spend": {"past": "spent"},
    "go": {"3sg": "goes", "past": "went", "part": "gone"},
    "run": {"past": "ran"},
    "come": {"past": "came"},
    "fly": {"past": "flew", "part": "flown"},
    "swim": {"past": "swam", "part": "swum"},
    "drive": {"past": "drove", "part": "driven"},
    "ride": {"past": "rode", "part": "ridden"},
    "leave": {"past": "left"},
    "fall": {"past": "fell", "part": "fallen"},
    "throw": {"past": "threw", "part": "thrown"},
    "say": {"past": "said"},
    "tell": {"past": "told"},
    "read": {"past": "read"},
    "sing": {"past": "sang", "part": "sung"},
    "think": {"past": "thought"},
    "know": {"past": "knew", "part": "known"},
    "forget": {"past": "forgot", "part": "forgotten"},
    "learn": {"past": "learned"},
    "see": {"past": "saw", "part": "seen"},
    "hear": {"past": "heard"},
    "feel": {"past": "felt"},
    "sleep": {"past": "slept"},
    "sit": {"past": "sat"},
    "stand": {"past": "stood"},
    "meet": {"past": "met"},
    "begin": {"past": "began", "part": "begun"},
    "grow": {"past": "grew", "part": "grown"},
    "wear": {"past": "wore", "part": "worn"},
    "sweep": {"past": "swept"},
    "hang": {"past": "hung"},
    "put": {"past": "put"},
    "set": {"past": "set"},
    "cost": {"past": "cost"},
    "feed": {"past": "fed"},
    "bring": {"past": "brought"},
    "teach": {"past": "taught"},
    "choose": {"past": "chose", "part": "chosen"},
    "show": {"past": "showed", "part": "shown"},
    "dig": {"past": "dug"},
    "do": {"3sg": "does", "past": "did", "part": "done"},
    "lie": {"past": "lay", "part": "lain", "ing": "lying"},
    "fight": {"past": "fought"},
    "stick": {"past": "stuck"},
    "hide": {"past": "hid", "part": "hidden"},
    "bend": {"past": "bent"},
    "hit": {"past": "hit"},
    "hurt": {"past": "hurt"},
    "shut": {"past": "shut"},
    "mean": {"past": "meant"},
    "seek": {"past": "sought"},
    "freeze": {"past": "froze", "part": "frozen"},
    "shake": {"past": "shook", "part": "shaken"},
    "bite": {"past": "bit", "part": "bitten"},
    "kneel": {"past": "knelt"},
    "burst": {"past": "burst"},
}

DOUBLE_FINAL = {
    "plan", "stop", "drop", "shop", "grab", "chop", "skip", "hop", "slip",
    "wrap", "trim", "scrub", "pin", "hug", "jog", "pat", "rub", "nod",
    "clap", "step", "drag", "stir", "chat", "knit", "pet", "spot", "snap",
    "trap", "zip", "slam", "slap", "tap", "tip", "rob", "dig", "tug",
    "pop", "sip", "whip", "stuff", "swim", "run", "begin", "sit", "win",
    "put", "set", "cut", "hit", "get", "forget", "pump",
}

VOWELS = set("aeiou")


def third_singular(base: str) -> str:
    if base.endswith(("s", "x", "z", "ch", "sh", "o")):
        return base + "es"
    if base.endswith("y") and len(base) > 1 and base[-2] not in VOWELS:
        return base[:-1] + "ies"
    return base + "s"


def past_tense(base: str) -> str:
    if base.endswith("e"):
        return base + "d"
    if base.endswith("y") and len(base) > 1 and base[-2] not in VOWELS:
        return base[:-1] + "ied"
    if base in DOUBLE_FINAL:
        return base + base[-1] + "ed"
    return base + "ed"


def gerund(base: str) -> str:
    if base.endswith("ie"):
        return base[:-2] + "ying"
    if base.endswith("e") and not base.endswith(("ee", "oe", "ye")):
        return base[:-1] + "ing"
    if base in DOUBLE_FINAL:
        return base + base[-1] + "ing"
    return base + "ing"


def inflections(base: str) -> list[str]:
    irr = IRREGULAR.get(base, {})
    if "forms" in irr:
        return [base] + irr["forms"]
    forms = [base, irr.get("3sg", third_singular(base))]
    past = irr.get("past", past_tense(base))
    part = irr.get("part", past)
    ing = irr.get("ing", gerund(base))
    forms += [past, part, ing]
    out = []
    for f in forms:
        if f not in out:
            out.append(f)
    return out


def rng_for(name: str) -> np.random.Generator:
    return np.random.default_rng(zlib.crc32(name.encode("utf-8")))


def unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)

    groups: dict[str, list[str]] = {}
    for name, verbs in {**CORE_GROUPS, **EXTRA_LEXICON_GROUPS}.items():
        groups[name] = [v for v in verbs if not v[-1].isdigit()]

    general = [w for w in GENERAL_VERBS.split() if not w[-1].isdigit()]
    misc_names = [f"general_{i}" for i in range(12)]
    for name in misc_names:
        groups[name] = []
    for verb in general:
        groups[misc_names[zlib.crc32(verb.encode()) % len(misc_names)]].append(verb)

    lexicon_bases = []
    for name in list(CORE_GROUPS) + list(EXTRA_LEXICON_GROUPS):
        lexicon_bases.extend(groups[name])

    lexicon_forms = []
    seen = set()
    for base in lexicon_bases:
        for form in inflections(base):
            if form not in seen:
                seen.add(form)
                lexicon_forms.append(form)
    (DATA_DIR / "verb_lexicon.txt").write_text(
        "\n".join(sorted(lexicon_forms)) + "\n", encoding="utf-8"
    )

    rows = []
    for gname in sorted(groups):
        center = unit(rng_for("center:" + gname).normal(size=DIM))
        for base in groups[gname]:
            bvec = unit(center + VERB_NOISE * rng_for("verb:" + base).normal(size=DIM))
            for form in inflections(base):
                if form == base:
                    vec = bvec
                else:
                    vec = unit(bvec + FORM_NOISE * rng_for("form:" + form).normal(size=DIM))
                rows.append((form, vec))

    table: dict[str, np.ndarray] = {}
    for form, vec in rows:
        table.setdefault(form, vec)  # first group listing a form wins

    with open(DATA_DIR / "verb_embeddings.tsv", "w", encoding="utf-8") as fh:
        for form in sorted(table):
            coords = "\t".join(f"{x:.6f}" for x in table[form])
            fh.write(f"{form}\t{coords}\n")

    print(f"lexicon forms: {len(lexicon_forms)}")
    print(f"embedding entries: {len(table)}")


if __name__ == "__main__":
    main()
