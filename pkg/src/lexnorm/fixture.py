"""Synthetic Portuguese review corpora with planted, annotated noise.

A small generative grammar produces product-review sentences in which every
noun has its own collocating adjectives and verbs, so that words get
distinguishable distributional contexts. Each canonical word is assigned a
fixed set of noisy variants, one per applicable transform:

* ``diacritic_drop``: ``você`` -> ``voce`` (orthographic; a real-word error
  when the stripped form is itself canonical, e.g. ``é`` -> ``e``)
* ``phonetic``: spelling substitutions such as ``ç`` -> ``ss`` (orthographic)
* ``abbreviation``: vowel dropping and common slang (``você`` -> ``vc``)
* ``repetition``: expressive lengthening of the last vowel (slang)

A token with ``m`` applicable transforms receives transform ``t`` with
probability ``rate[t] / m``, so uniform rates ``r`` corrupt a fraction ``r``
of the eligible tokens.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .evaluation import AnnotatedError, AnnotatedRecord, AnnotatedSample, save_sample
from .strsim import strip_diacritics

__all__ = [
    "TRANSFORMS",
    "NoiseSpec",
    "Variant",
    "Fixture",
    "apply_transform",
    "build_variant_table",
    "make_fixture",
    "write_fixture",
]

TRANSFORMS = ("diacritic_drop", "phonetic", "abbreviation", "repetition")

# noun -> (gender, adjectives, verbs)
NOUNS = {
    "produto": ("m", "ótimo excelente barato", "comprei recomendo recebi"),
    "celular": ("m", "rápido leve bonito", "comprei troquei uso"),
    "câmera": ("f", "incrível nítida prática", "testei usei adorei"),
    "bateria": ("f", "fraca durável péssima", "troquei carreguei testei"),
    "tela": ("f", "nítida grande frágil", "limpei quebrei achei"),
    "preço": ("m", "justo alto razoável", "paguei achei esperava"),
    "entrega": ("f", "rápida atrasada perfeita", "esperei recebi acompanhei"),
    "qualidade": ("f", "excelente péssima razoável", "esperava achei elogio"),
    "serviço": ("m", "péssimo ótimo rápido", "contratei avaliei usei"),
    "loja": ("f", "confiável séria ótima", "recomendo indico visitei"),
    "aparelho": ("m", "resistente moderno prático", "liguei desliguei uso"),
    "fone": ("m", "confortável leve barato", "uso perdi ganhei"),
    "som": ("m", "alto limpo forte", "ouvi ajustei aumentei"),
    "imagem": ("f", "nítida escura bonita", "vi ajustei achei"),
    "cor": ("f", "linda forte diferente", "escolhi adorei troquei"),
    "tamanho": ("m", "ideal pequeno grande", "escolhi errei troquei"),
    "memória": ("f", "suficiente pequena rápida", "aumentei limpei usei"),
    "capa": ("f", "resistente bonita macia", "comprei ganhei troquei"),
    "carregador": ("m", "original lento rápido", "perdi esqueci comprei"),
    "cabo": ("m", "curto frágil resistente", "conectei perdi troquei"),
    "televisão": ("f", "enorme moderna fina", "assisti liguei instalei"),
    "geladeira": ("f", "silenciosa econômica espaçosa", "instalei limpei comprei"),
    "fogão": ("m", "prático econômico pesado", "instalei limpei usei"),
    "máquina": ("f", "silenciosa econômica rápida", "usei liguei testei"),
    "relógio": ("m", "elegante bonito preciso", "ganhei uso ajustei"),
    "livro": ("m", "interessante longo emocionante", "li terminei indico"),
    "história": ("f", "emocionante triste interessante", "li contei adorei"),
    "música": ("f", "animada triste linda", "ouvi cantei adorei"),
    "filme": ("m", "emocionante longo engraçado", "assisti vi indico"),
    "série": ("f", "viciante longa engraçada", "assisti terminei recomendo"),
    "presente": ("m", "perfeito lindo especial", "ganhei dei embrulhei"),
    "pedido": ("m", "completo atrasado errado", "fiz cancelei recebi"),
    "vendedor": ("m", "atencioso educado honesto", "elogio avaliei contatei"),
    "atendimento": ("m", "péssimo atencioso rápido", "elogio avaliei recebi"),
    "embalagem": ("f", "frágil bonita simples", "abri guardei joguei"),
    "garantia": ("f", "longa curta estendida", "acionei usei perdi"),
    "função": ("f", "útil prática escondida", "descobri usei testei"),
    "botão": ("m", "duro pequeno sensível", "apertei quebrei achei"),
    "teclado": ("m", "macio silencioso confortável", "uso limpei troquei"),
    "computador": ("m", "rápido potente silencioso", "montei liguei uso"),
    "impressora": ("f", "lenta barulhenta econômica", "instalei liguei devolvi"),
    "sapato": ("m", "confortável apertado elegante", "calcei comprei troquei"),
    "tênis": ("m", "confortável leve bonito", "calcei uso ganhei"),
    "camisa": ("f", "macia elegante apertada", "vesti lavei comprei"),
    "vestido": ("m", "lindo elegante curto", "vesti experimentei ganhei"),
    "bolsa": ("f", "espaçosa elegante prática", "uso ganhei comprei"),
    "perfume": ("m", "suave forte marcante", "ganhei uso senti"),
    "café": ("m", "forte amargo delicioso", "bebi provei preparei"),
    "chocolate": ("m", "delicioso amargo doce", "comi provei dividi"),
    "açúcar": ("m", "refinado doce barato", "coloquei comprei usei"),
    "água": ("f", "gelada limpa mineral", "bebi esquentei esqueci"),
    "cozinha": ("f", "limpa espaçosa moderna", "limpei organizei reformei"),
    "família": ("f", "feliz satisfeita grande", "visitei ajudei reuni"),
    "irmão": ("m", "satisfeito feliz exigente", "ajudei visitei presenteei"),
    "mãe": ("f", "satisfeita feliz exigente", "ajudei visitei presenteei"),
    "avó": ("f", "feliz satisfeita exigente", "visitei ajudei presenteei"),
    "viagem": ("f", "longa cansativa incrível", "fiz planejei adorei"),
    "cadeira": ("f", "confortável firme pesada", "montei sentei troquei"),
    "colchão": ("m", "macio firme confortável", "dormi troquei comprei"),
    "óculos": ("m", "elegante leve resistente", "uso perdi quebrei"),
}

ADVERBS = "muito bem bastante realmente sempre ainda também já só demais".split()
TIMES = "hoje ontem amanhã depois agora".split()
HOURS = "duas três oito nove dez onze".split()
PLURALS = "fotos cores peças instruções opções avaliações".split()
REACTIONS = [":)", ":(", ";)", "!!!", "..."]
FAMILY = ("mãe", "avó", "irmão", "família")

# canonical words that are only ever used by the sentence templates below
TEMPLATE_WORDS = """
o a os as um uma de do da dos em no na para com que não mas e é está esta este
eu ele ela você nós nos eles elas meu minha seu sua isso porque quando tudo
mesmo beleza horas às dá tem têm gosto trabalho medo chegou veio funciona
achei gostei amei todas recomendo lá vou voltar comprar amigos ajudou sempre
""".split()

SLANG = {
    "você": "vc",
    "não": "naum",
    "também": "tb",
    "muito": "mto",
    "porque": "pq",
    "que": "q",
    "beleza": "blz",
    "hoje": "hj",
    "para": "pra",
    "mesmo": "msm",
    "tudo": "td",
    "quando": "qdo",
}

PHONETIC_RULES = [
    ("ç", "ss"),
    ("ss", "ç"),
    ("ch", "x"),
    ("lh", "li"),
    ("nh", "ni"),
    ("gem", "jem"),
    ("ge", "je"),
    ("qu", "k"),
    ("ce", "se"),
    ("ci", "si"),
    ("ão", "aum"),
    ("s", "z"),
]
_SLANG_PHONETIC = {("qu", "k"), ("ão", "aum")}
_VOWELS = set("aeiouáéíóúâêôãõàü")


@dataclass
class NoiseSpec:
    """Per-transform noise rates (see the module docstring for their meaning)."""

    rates: dict = field(default_factory=lambda: {t: 0.15 for t in TRANSFORMS})

    def __post_init__(self):
        for name, rate in self.rates.items():
            if name not in TRANSFORMS:
                raise ValueError(f"unknown noise transform {name!r}")
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"noise rate for {name} outside [0, 1]: {rate}")

    @classmethod
    def uniform(cls, rate: float) -> "NoiseSpec":
        return cls({t: rate for t in TRANSFORMS})


@dataclass(frozen=True)
class Variant:
    noisy: str
    canonical: str
    transform: str
    category: str


def _phonetic(word: str) -> Optional[tuple]:
    for src, dst in PHONETIC_RULES:
        # intervocalic s -> z only
        if src == "s":
            for i in range(1, len(word) - 1):
                if word[i] == "s" and word[i - 1] in _VOWELS and word[i + 1] in _VOWELS:
                    return word[:i] + "z" + word[i + 1:], (src, dst)
            continue
        if src in word:
            i = word.rfind(src) if src == "ão" else word.find(src)
            return word[:i] + dst + word[i + len(src):], (src, dst)
    return None


def _abbreviate(word: str) -> Optional[str]:
    if word in SLANG:
        return SLANG[word]
    if len(word) < 5:
        return None
    short = word[0] + "".join(c for c in word[1:] if c not in _VOWELS)
    return short if len(short) >= 3 else None


def apply_transform(word: str, transform: str) -> Optional[str]:
    """The noisy form of ``word`` under ``transform``, or None if inapplicable."""
    if transform == "diacritic_drop":
        out = strip_diacritics(word)
    elif transform == "phonetic":
        hit = _phonetic(word)
        out = hit[0] if hit else None
    elif transform == "abbreviation":
        out = _abbreviate(word)
    elif transform == "repetition":
        last = max((i for i, c in enumerate(word) if c in _VOWELS), default=None)
        out = None if last is None or len(word) < 3 else word[:last] + word[last] * 3 + word[last + 1:]
    else:
        raise ValueError(f"unknown transform {transform!r}")
    return out if out and out != word else None


def _category(word: str, noisy: str, transform: str, canonical: set) -> str:
    if noisy in canonical:
        return "rwe"
    if transform in ("abbreviation", "repetition"):
        return "slang"
    if transform == "phonetic" and _phonetic(word)[1] in _SLANG_PHONETIC:
        return "slang"
    return "orthographic"


def build_variant_table(words, rwe: bool = True) -> dict:
    """canonical word -> {transform: Variant}; noisy forms never collide.

    A noisy form equal to another canonical word is kept only for the
    diacritic drop, and only when ``rwe`` is true.
    """
    canonical = set(words)
    owner: dict = {}
    table: dict = {w: {} for w in sorted(canonical)}
    for transform in TRANSFORMS:
        for w in sorted(canonical):
            noisy = apply_transform(w, transform)
            if noisy is None or noisy in owner:
                continue
            if noisy in canonical and not (rwe and transform == "diacritic_drop"):
                continue
            cat = _category(w, noisy, transform, canonical)
            owner[noisy] = w
            table[w][transform] = Variant(noisy, w, transform, cat)
    return table


class _Grammar:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.nouns = sorted(NOUNS)

    def det(self, noun: str, kind: str = "def") -> str:
        g = NOUNS[noun][0]
        if kind == "def":
            return "o" if g == "m" else "a"
        if kind == "indef":
            return "um" if g == "m" else "uma"
        if kind == "this":
            return "este" if g == "m" else "esta"
        if kind == "of":
            return "do" if g == "m" else "da"
        if kind == "my":
            return "meu" if g == "m" else "minha"
        raise ValueError(kind)

    def pick(self, seq):
        return self.rng.choice(seq)

    def sentence(self) -> list:
        r = self.rng
        n = self.pick(self.nouns)
        adjs = NOUNS[n][1].split()
        verbs = NOUNS[n][2].split()
        a, v = self.pick(adjs), self.pick(verbs)
        adv = self.pick(ADVERBS)
        t = r.randrange(16)
        if t == 0:
            s = [self.det(n), n, "é", adv, a]
        elif t == 1:
            s = ["eu", v, self.det(n), n, "e", "achei", a]
        elif t == 2:
            s = [self.det(n), n, "está", a, "e", self.pick(adjs)]
        elif t == 3:
            s = [self.det(n, "this"), n, "é", a, "demais"]
        elif t == 4:
            s = [self.det(n), n, "chegou", "às", self.pick(HOURS), "horas"]
        elif t == 5:
            s = ["gostei", "de", "todas", "as", self.pick(PLURALS), self.det(n, "of"), n]
        elif t == 6:
            s = ["você", v, self.det(n), n, "?"] if r.random() < 0.5 else ["você", "vai", "achar", self.det(n), n, a]
        elif t == 7:
            s = ["não", v, self.det(n), n, "porque", "é", a]
        elif t == 8:
            s = [self.det(n), n, "dá", self.pick(["gosto", "trabalho", "medo"]), "de", "usar"]
        elif t == 9:
            if r.random() < 0.5:
                s = ["eles", "têm", self.det(n, "indef"), n, a]
            else:
                s = ["ele", "tem", self.det(n, "indef"), n, a]
        elif t == 10:
            if r.random() < 0.5:
                s = ["nós", v, self.det(n), n, self.pick(TIMES)]
            else:
                s = [self.det(n), n, "nos", "ajudou", adv]
        elif t == 11:
            s = ["também", v, self.det(n, "my"), n, "quando", "era", a]
        elif t == 12:
            fam = self.pick(FAMILY)
            s = ["hoje", v, self.det(n), n, "para", self.det(fam, "my"), fam]
        elif t == 13:
            s = ["tudo", a, "com", self.det(n), n, ",", "beleza"]
        elif t == 14:
            s = ["mesmo", "assim", "ele", "é", a, "e", self.pick(adjs)]
            s = [self.det(n), n, *s[3:]] if r.random() < 0.7 else s
        else:
            s = ["vou", "lá", "comprar", self.det(n, "indef"), n, self.pick(TIMES)]
        if s[-1] != "?":
            s.append("." if r.random() < 0.8 else self.pick(REACTIONS))
        return s


def canonical_vocabulary() -> list:
    words = set(TEMPLATE_WORDS) | set(ADVERBS) | set(TIMES) | set(HOURS) | set(PLURALS)
    words |= {"assim", "vai", "achar", "usar", "era", "ajudou", "de", "gosto", "trabalho", "medo"}
    for noun, (_, adjs, verbs) in NOUNS.items():
        words.add(noun)
        words.update(adjs.split())
        words.update(verbs.split())
    return sorted(words)


@dataclass
class Fixture:
    clean_sentences: list
    noisy_sentences: list
    sample: AnnotatedSample
    canonical: list
    frequencies: dict
    variants: dict


def _noise(tokens: list, table: dict, spec: NoiseSpec, rng: random.Random):
    out, errors = [], []
    for i, tok in enumerate(tokens):
        choices = table.get(tok, {})
        applicable = sum(1 for t in TRANSFORMS if t in choices)
        u = rng.random()
        acc = 0.0
        chosen = None
        for transform in TRANSFORMS:
            var = choices.get(transform)
            if var is None:
                continue
            acc += spec.rates.get(transform, 0.0) / applicable
            if u < acc:
                chosen = var
                break
        if chosen is None:
            out.append(tok)
        else:
            out.append(chosen.noisy)
            errors.append((i, chosen))
    return out, errors


def make_fixture(
    seed: int = 7,
    size: int = 20000,
    noise: Optional[NoiseSpec] = None,
    reviews: int = 60,
    sentences_per_review: int = 3,
) -> Fixture:
    """Generate corpora, gold sample, canonical list and frequency list."""
    noise = noise or NoiseSpec()
    rng = random.Random(seed)
    grammar = _Grammar(rng)
    canonical = canonical_vocabulary()
    table = build_variant_table(canonical)

    clean, noisy = [], []
    for _ in range(size):
        s = grammar.sentence()
        clean.append(s)
        noisy.append(_noise(s, table, noise, rng)[0])

    records = []
    for _ in range(reviews):
        tokens, errors = [], []
        for _ in range(sentences_per_review):
            s = grammar.sentence()
            noised, errs = _noise(s, table, noise, rng)
            errors.extend(AnnotatedError(len(tokens) + i, v.canonical, v.category) for i, v in errs)
            tokens.extend(noised)
        records.append(AnnotatedRecord(tokens, errors))

    counts = Counter(w for s in clean for w in s)
    # reference frequency list: the clean corpus seen at 10x scale, plus
    # rare words that pruning should drop and frequent ones the corpus lacks
    freq = {w: counts[w] * 10 for w in canonical if counts[w]}
    extra_rare = ["arcaico", "obsoleto", "xilogravura", "quimera", "efêmero"]
    extra_common = ["janela", "porta", "cidade"]
    for i, w in enumerate(extra_rare):
        freq[w] = 5 + 20 * i
    for w in extra_common:
        freq[w] = 5000
    raw_lexicon = sorted(set(canonical) | set(extra_rare) | set(extra_common))
    return Fixture(clean, noisy, AnnotatedSample(records), raw_lexicon, freq, table)


def write_fixture(fx: Fixture, outdir: Union[str, Path]) -> dict:
    """Write the fixture files into ``outdir``; returns name -> path."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "clean": out / "clean_corpus.txt",
        "noisy": out / "noisy_corpus.txt",
        "gold": out / "gold.jsonl",
        "gold_text": out / "gold.txt",
        "canonical": out / "canonical.txt",
        "frequencies": out / "frequencies.txt",
        "variants": out / "variants.json",
    }
    paths["clean"].write_text("".join(" ".join(s) + "\n" for s in fx.clean_sentences), encoding="utf-8")
    paths["noisy"].write_text("".join(" ".join(s) + "\n" for s in fx.noisy_sentences), encoding="utf-8")
    save_sample(fx.sample, paths["gold"])
    paths["gold_text"].write_text("".join(r.text + "\n" for r in fx.sample.records), encoding="utf-8")
    paths["canonical"].write_text("".join(w + "\n" for w in fx.canonical), encoding="utf-8")
    paths["frequencies"].write_text(
        "".join(f"{w} {c}\n" for w, c in sorted(fx.frequencies.items())), encoding="utf-8"
    )
    variants = {
        w: {t: {"noisy": v.noisy, "category": v.category} for t, v in vs.items()} for w, vs in fx.variants.items() if vs
    }
    paths["variants"].write_text(json.dumps(variants, ensure_ascii=False, indent=1, sort_keys=True), encoding="utf-8")
    return {k: str(v) for k, v in paths.items()}
