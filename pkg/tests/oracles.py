"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written from the underlying definitions
with different data structures than the library (dense tables, exact
rationals, plain token loops) so that agreement between the two is
meaningful evidence rather than the same code run twice.
"""

import math
from fractions import Fraction

# --------------------------------------------------------- Fisher's exact


def fisher_exact_fraction(a: int, b: int, c: int, d: int) -> Fraction:
    """Two-sided Fisher p as an exact rational.

    Enumerates every table with the observed margins and sums the
    hypergeometric probabilities of those no more probable than the
    observed table, comparing exactly.
    """
    r1, r2 = a + b, c + d
    c1 = a + c
    n = r1 + r2
    denom = math.comb(n, c1)

    def prob(x: int) -> Fraction | None:
        y = c1 - x
        if x < 0 or x > r1 or y < 0 or y > r2:
            return None
        return Fraction(math.comb(r1, x) * math.comb(r2, y), denom)

    p_obs = prob(a)
    assert p_obs is not None
    total = Fraction(0)
    for x in range(0, min(r1, c1) + 1):
        p = prob(x)
        if p is not None and p <= p_obs:
            total += p
    return min(total, Fraction(1))


# --------------------------------------------------------------- IBM-1 EM


def em_reference(
    pairs: list[tuple[list[str], list[str]]],
    iterations: int,
    lambda_: float,
    null_prob: float,
) -> tuple[dict[tuple[str, str], float], list[float]]:
    """Dense-matrix EM for the same model: returns ((src, tgt) -> prob,
    per-iteration log-likelihood computed before each re-estimation)."""
    src_vocab = sorted({w for s, _ in pairs for w in s} | ({"<null>"} if null_prob > 0 else set()))
    tgt_vocab = sorted({w for _, t in pairs for w in t})
    si = {w: i for i, w in enumerate(src_vocab)}
    ti = {w: i for i, w in enumerate(tgt_vocab)}

    cooc = [[False] * len(tgt_vocab) for _ in src_vocab]
    for source, target in pairs:
        rows = [si[w] for w in source]
        if null_prob > 0:
            rows.append(si["<null>"])
        for w in target:
            for r in rows:
                cooc[r][ti[w]] = True
    t = []
    for r in range(len(src_vocab)):
        k = sum(cooc[r])
        t.append([1.0 / k if cooc[r][col] else 0.0 for col in range(len(tgt_vocab))])

    def priors(n_src: int, n_tgt: int, j: int) -> list[float]:
        if lambda_ == 0.0:
            weights = [1.0] * n_src
        else:
            weights = [
                math.exp(-lambda_ * abs(i / n_src - j / n_tgt)) for i in range(n_src)
            ]
        z = sum(weights)
        return [w * (1.0 - null_prob) / z for w in weights]

    ll_history = []
    for _ in range(iterations):
        counts = [[0.0] * len(tgt_vocab) for _ in src_vocab]
        totals = [0.0] * len(src_vocab)
        ll = 0.0
        for source, target in pairs:
            n_src, n_tgt = len(source), len(target)
            for j, tgt_word in enumerate(target):
                col = ti[tgt_word]
                pri = priors(n_src, n_tgt, j)
                terms = []
                if null_prob > 0:
                    terms.append((si["<null>"], null_prob * t[si["<null>"]][col]))
                for i, src_word in enumerate(source):
                    terms.append((si[src_word], pri[i] * t[si[src_word]][col]))
                z = sum(w for _, w in terms)
                ll += math.log(z)
                for row, w in terms:
                    counts[row][col] += w / z
                    totals[row] += w / z
        for r in range(len(src_vocab)):
            if totals[r] > 0.0:
                t[r] = [c / totals[r] for c in counts[r]]
        ll_history.append(ll)

    table = {}
    for src, r in si.items():
        for tgt, col in ti.items():
            if t[r][col] > 0.0:
                table[(src, tgt)] = t[r][col]
    return table, ll_history


# ------------------------------------------------------ accuracy counting


def acc_1dec(correct: int, total: int) -> float:
    """100*correct/total, one decimal, ties away from zero, exact integer
    arithmetic throughout."""
    if total == 0:
        raise ZeroDivisionError
    return ((2000 * correct + total) // (2 * total)) / 10


def brute_token_scores(gold_doc, sys_doc) -> dict[str, float]:
    """Per-attribute accuracies for two identically tokenized documents,
    counted with plain loops. Returns the same 1-decimal percentages the
    evaluator reports for the gold-tokenization setting."""
    gold = [t for s in gold_doc.sentences for t in s.tokens]
    system = [t for s in sys_doc.sentences for t in s.tokens]
    assert len(gold) == len(system)
    assert [t.form for t in gold] == [t.form for t in system]
    n = len(gold)
    hits = {"upos": 0, "xpos": 0, "ufeats": 0, "alltags": 0, "lemma": 0, "uas": 0, "las": 0}

    # heads must be compared as positions in the document, not sentence ids
    def flat_heads(doc):
        heads = []
        base = 0
        for sent in doc.sentences:
            for tok in sent.tokens:
                if tok.head is None:
                    heads.append(("unset",))
                elif tok.head == 0:
                    heads.append(("root",))
                else:
                    heads.append(("tok", base + tok.head - 1))
            base += len(sent.tokens)
        return heads

    gh, sh = flat_heads(gold_doc), flat_heads(sys_doc)
    for i in range(n):
        g, s = gold[i], system[i]
        g_upos = g.upos or "_"
        s_upos = s.upos or "_"
        g_xpos = g.xpos or "_"
        s_xpos = s.xpos or "_"
        g_feats = dict(g.feats)
        s_feats = dict(s.feats)
        if g_upos == s_upos:
            hits["upos"] += 1
        if g_xpos == s_xpos:
            hits["xpos"] += 1
        if g_feats == s_feats:
            hits["ufeats"] += 1
        if g_upos == s_upos and g_xpos == s_xpos and g_feats == s_feats:
            hits["alltags"] += 1
        if (g.lemma or "_") == (s.lemma or "_"):
            hits["lemma"] += 1
        head_ok = gh[i] == sh[i] and gh[i][0] != "unset"
        if head_ok:
            hits["uas"] += 1
            if (g.deprel or "_") == (s.deprel or "_"):
                hits["las"] += 1
    return {k: acc_1dec(v, n) for k, v in hits.items()}


def brute_upos_score(gold_doc, sys_doc) -> tuple[int, int, float]:
    """(correct, total, pct) UPOS agreement; independent of score_procedure."""
    correct = total = 0
    for gs, ss in zip(gold_doc.sentences, sys_doc.sentences):
        for g, s in zip(gs.tokens, ss.tokens):
            total += 1
            if (g.upos or "_") == (s.upos or "_"):
                correct += 1
    return correct, total, acc_1dec(correct, total)
