"""Independent oracles: free reduction and the C2 x F2 model of the torsion examples."""

import itertools


def free_reduce(word):
    out = []
    for g, e in word:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def central_c2_model(word, central):
    """Image in C2 x F: letters named ``central`` are a central involution."""
    parity = sum(1 for g, _ in word if g in central) % 2
    return parity, free_reduce([(g, e) for g, e in word if g not in central])


def free_word_count(rank: int, length: int) -> int:
    return 1 if length == 0 else 2 * rank * (2 * rank - 1) ** (length - 1)


def reduced_words(letters, length):
    """All freely reduced words of the given length over letters and inverses."""
    alphabet = [(x, 1) for x in letters] + [(x, -1) for x in letters]
    for w in itertools.product(alphabet, repeat=length):
        if all(w[i + 1] != (w[i][0], -w[i][1]) for i in range(length - 1)):
            yield w
