"""
Tag streams: category reduction, marker relabeling, fallback tagging
====================================================================

"""

from styloprof.pos import TaggedToken, fallback_tag, relabel, simple_tokenize

# a tagger emits fine-grained tags; only the leading category letter is
# kept, so "VBD" and "VBG" both land on V
tagged = [
    TaggedToken("I", "PRP"), TaggedToken("was", "VBD"),
    TaggedToken("just", "RB"), TaggedToken("watching", "VBG"),
    TaggedToken("``update", "NN"), TaggedToken("10.''", "Z"),
    TaggedToken("@us", ""), TaggedToken("htt", ""),
]
print(" ".join(relabel(tagged)))

# the two marker tokens were rewritten by normalization, so no tagger
# knows them; relabel gives them their own tags (REF@USERNAME, REF#LINK,
# and REF#HASHTAG for #tags) instead of dropping them

# without a tagger there is still a total fallback: lexicon lookup,
# then numeral and punctuation shapes, then N
text = "gana 3.5 millones !!! ver @us htt #gol"
tokens = fallback_tag(simple_tokenize(text), lexicon={"ver": "V"})
for tok in tokens:
    print(f"  {tok.surface:<8} {tok.fine_tag}")
print(" ".join(relabel(tokens)))
