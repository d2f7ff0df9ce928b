"""Bundled demonstration corpus.

Small enough to train in seconds, rich enough to exercise every math
concept, both transfer directions, all three rate placements, and the
comparison patterns.  The held-out half includes minimally different
problem pairs (gave to / received from, shared-subject comparisons) so
surface word statistics alone cannot separate them.  Two nodes carry
concept labels that the annotation heuristics read differently, keeping
the agreement rate realistic.
"""

from __future__ import annotations

import os

from .corpus import problem_from_record, write_records
from .extraction import ExtractionRules, default_rules

TRAIN_RECORDS = (
    # ----- transfer
    {
        "id": "t01",
        "text": "Tom has 5 books. Dan gave him 4 books. How many books does Tom have now?",
        "solution": "5[1]+4[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t02",
        "text": "Sam had 5 pennies in his pocket. Sam found 3 pennies at the park. How many pennies does Sam have now?",
        "solution": "5[1]+3[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t03",
        "text": "Joan found 70 seashells and 3 starfish on the beach. She gave 27 seashells to Sam. How many seashells does Joan have now?",
        "solution": "70[1]-27[3]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t04",
        "text": "Mrs. Price baked 40 muffins. Her children ate 13 muffins. How many muffins are left?",
        "solution": "40[1]-13[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t05",
        "text": "Lena wrote 24 poems last year. She tore up 9 of her poems. How many poems does Lena have left?",
        "solution": "24[1]-9[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t06",
        "text": "Dan collected 43 cans for recycling. Dan gave 18 cans to his brother. How many cans does Dan have left?",
        "solution": "43[1]-18[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t07",
        "text": "Paul had 4 dollars saved up. Paul earned 9 dollars washing cars. How much money does Paul have now?",
        "solution": "4[1]+9[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t08",
        "text": "Ivy lost 11 buttons on the way home. Now Ivy has 28 buttons. How many buttons did Ivy have at first?",
        "solution": "11[1]+28[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t09",
        "text": "Ben bought 19 stamps at the post office. Now Ben has 31 stamps. How many stamps did Ben have before?",
        "solution": "31[2]-19[1]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t10",
        "text": "Rachel has 16 crayons. Her friend owns 7 crayons. How many more crayons does Rachel have than her friend?",
        "solution": "16[1]-7[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t11",
        "text": "Joan's cat had 6 kittens. She got 9 kittens from the shelter. Then she gave 3 kittens to her neighbors. How many kittens does Joan have now?",
        "solution": "(6[1]+9[2])-3[3]",
        "concepts": {"L": "Transfer", "": "Transfer"},
    },
    {
        "id": "t12",
        "text": "Ava has 30 stickers. Ben gave 12 stickers to Ava. How many stickers does Ava have now?",
        "solution": "30[1]+12[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "t13",
        "text": "Mara has 40 pears. Mara gave 15 pears to Jude. How many pears does Mara have now?",
        "solution": "40[1]-15[2]",
        "concepts": {"": "Transfer"},
    },
    # ----- part-whole
    {
        "id": "p01",
        # labeled part-whole; the verb heuristic reads the differing verbs
        # as a transfer, which is the intended annotation noise
        "text": "The Hawks won 12 games and lost 5 games this season. How many games did the Hawks play in all?",
        "solution": "12[1]+5[2]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "p02",
        "text": "Ella baked 12 chocolate cupcakes and 9 vanilla cupcakes for the fair. How many cupcakes did Ella bake?",
        "solution": "12[1]+9[2]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "p03",
        "text": "A baker made 48 bread rolls in the morning. He made 29 bread rolls in the afternoon. How many bread rolls did the baker make in total?",
        "solution": "48[1]+29[2]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "p04",
        "text": "Ned won 8 tickets playing darts. Ned won 10 tickets playing skee ball. How many tickets did Ned win in all?",
        "solution": "8[1]+10[2]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "p05",
        "text": "Mia made 30 cookies for the bake sale. Mia made 12 sugar cookies and the rest were ginger cookies. How many ginger cookies did Mia make?",
        "solution": "30[1]-12[2]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "p06",
        "text": "Mia made 12 sugar cookies and some ginger cookies. Mia made 30 cookies altogether. How many ginger cookies did Mia make?",
        "solution": "30[2]-12[1]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "p07",
        # second noisy label: the verbs differ, so the heuristic says transfer
        "text": "Hector kept 50 marbles in a jar. 23 of the marbles were blue and the rest were white. How many marbles were white?",
        "solution": "50[1]-23[2]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "p08",
        "text": "Tara found 14 spiral shells and 20 clam shells at the beach. How many shells did Tara find?",
        "solution": "14[1]+20[2]",
        "concepts": {"": "PartWhole"},
    },
    # ----- dimensional analysis
    {
        "id": "d01",
        "text": "Jason has 5 bags with 4 books in each bag. How many books does Jason have?",
        "solution": "5[1]*4[2]",
        "rates": [2],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "d02",
        "text": "Alan earns 9 dollars per hour at the bakery. How many dollars will Alan earn in 6 hours?",
        "solution": "9[1]*6[2]",
        "rates": [1],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "d03",
        "text": "Each box holds 8 crayons. Maria filled 7 boxes. How many crayons did Maria use?",
        "solution": "8[1]*7[2]",
        "rates": [1],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "d04",
        "text": "There are 7 days in each week. How many days are there in 9 weeks?",
        "solution": "7[1]*9[2]",
        "rates": [1],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "d05",
        "text": "Mrs. Hilt baked 16 pecan pies and 14 apple pies. She plans to set the pies out in rows with 5 pies in each row. How many rows of pies will she have?",
        "solution": "(16[1]+14[2])/5[3]",
        "rates": [3],
        "concepts": {"L": "PartWhole", "": "DimensionalAnalysis"},
    },
    {
        "id": "d06",
        "text": "Olga baked 20 cookies for school. She packs 5 cookies in each bag. How many bags will Olga fill?",
        "solution": "20[1]/5[2]",
        "rates": [2],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "d07",
        "text": "A grocer puts 6 apples in each basket. The grocer has 48 apples to pack. How many baskets will the grocer fill?",
        "solution": "6[1]\\48[2]",
        "rates": [1],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "d08",
        "text": "Pencils cost 3 dollars each at the shop. How many pencils can Greta buy with 12 dollars?",
        "solution": "3[1]\\12[2]",
        "rates": [1],
        "concepts": {"": "DimensionalAnalysis"},
    },
    # ----- explicit math
    {
        "id": "e01",
        "text": "Tom has 3 more apples than Dan. Dan has 5 apples. How many apples does Tom have?",
        "solution": "5[2]+3[1]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e02",
        "text": "Rosa picked 9 fewer peaches than Ada. Ada picked 30 peaches. How many peaches did Rosa pick?",
        "solution": "30[2]-9[1]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e03",
        "text": "Tom has 12 apples. Tom has 3 more apples than Dan. How many apples does Dan have?",
        "solution": "12[1]-3[2]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e04",
        "text": "Leo read 42 pages. Leo read 15 fewer pages than Zoe. How many pages did Zoe read?",
        "solution": "42[1]+15[2]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e05",
        "text": "Tom picked twice as many apples as Dan. Tom picked 12 apples. How many apples did Dan pick?",
        "solution": "2[1]\\12[2]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e06",
        "text": "Tom picked 12 apples. Tom picked twice as many apples as Dan. How many apples did Dan pick?",
        "solution": "12[1]/2[2]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e07",
        "text": "Dan has 4 stickers. Tom has twice as many stickers as Dan. How many stickers does Tom have?",
        "solution": "4[1]*2[2]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e08",
        "text": "A blue ribbon is 4 inches long. A red ribbon is thrice as long as the blue ribbon. How many inches long is the red ribbon?",
        "solution": "4[1]*3[2]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e09",
        "text": "Jill has 9 pens. Jill has 2 more pens than Kate. How many pens does Kate have?",
        "solution": "9[1]-2[2]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e10",
        "text": "Cody found 6 more rocks than Finn. Finn found 10 rocks. How many rocks did Cody find?",
        "solution": "10[2]+6[1]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e11",
        "text": "Gus has 7 more pins than Ray. Gus has 18 pins. How many pins does Ray have?",
        "solution": "18[2]-7[1]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "e12",
        "text": "Lee has 10 coins. Ken has 2 more coins than Lee. How many coins does Ken have?",
        "solution": "10[1]+2[2]",
        "concepts": {"": "ExplicitMath"},
    },
)

HELDOUT_RECORDS = (
    {
        "id": "h01",
        "text": "Liam has 70 marbles. Liam gave 27 marbles to Noah. How many marbles does Liam have now?",
        "solution": "70[1]-27[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "h02",
        "text": "Liam has 70 marbles. Noah gave 27 marbles to Liam. How many marbles does Liam have now?",
        "solution": "70[1]+27[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "h03",
        "text": "Rita had 22 pencils. Rita bought 14 pencils at the store. How many pencils does Rita have now?",
        "solution": "22[1]+14[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "h04",
        "text": "Nina had 45 grapes. Nina ate 16 grapes at lunch. How many grapes are left?",
        "solution": "45[1]-16[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "h05",
        "text": "Owen drew 13 small stars and 8 big stars on his poster. How many stars did Owen draw in all?",
        "solution": "13[1]+8[2]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "h06",
        "text": "Zoe bought 36 balloons. Zoe bought 10 red balloons and the rest were blue balloons. How many blue balloons did Zoe buy?",
        "solution": "36[1]-10[2]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "h07",
        "text": "Eli owns 9 history books and some comic books. Eli owns 25 books altogether. How many comic books does Eli own?",
        "solution": "25[2]-9[1]",
        "concepts": {"": "PartWhole"},
    },
    {
        "id": "h08",
        "text": "Each shelf holds 6 trophies. The coach filled 5 shelves. How many trophies are on the shelves?",
        "solution": "6[1]*5[2]",
        "rates": [1],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "h09",
        "text": "A farmer picked 42 peaches. He packs 7 peaches in each crate. How many crates will the farmer fill?",
        "solution": "42[1]/7[2]",
        "rates": [2],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "h10",
        "text": "Tickets cost 5 dollars each. How many tickets can Jay buy with 35 dollars?",
        "solution": "5[1]\\35[2]",
        "rates": [1],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "h11",
        "text": "Mia has 4 more shells than Eli. Eli has 11 shells. How many shells does Mia have?",
        "solution": "11[2]+4[1]",
        "concepts": {"": "ExplicitMath"},
    },
    {
        "id": "h12",
        "text": "Mia has 4 more shells than Eli. Mia has 11 shells. How many shells does Eli have?",
        "solution": "11[2]-4[1]",
        "concepts": {"": "ExplicitMath"},
    },
)


def train_problems(xrules: ExtractionRules | None = None) -> list:
    xrules = xrules or default_rules()
    return [problem_from_record(dict(r), xrules) for r in TRAIN_RECORDS]


def heldout_problems(xrules: ExtractionRules | None = None) -> list:
    xrules = xrules or default_rules()
    return [problem_from_record(dict(r), xrules) for r in HELDOUT_RECORDS]


def write_minicorpus(directory) -> tuple[str, str]:
    """Write train.jsonl and heldout.jsonl; returns the two paths."""
    os.makedirs(directory, exist_ok=True)
    train_path = os.path.join(directory, "train.jsonl")
    heldout_path = os.path.join(directory, "heldout.jsonl")
    write_records([dict(r) for r in TRAIN_RECORDS], train_path)
    write_records([dict(r) for r in HELDOUT_RECORDS], heldout_path)
    return train_path, heldout_path
