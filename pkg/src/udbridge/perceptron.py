"""Averaged multiclass perceptron over sparse binary features.

The tick counter advances once per training decision (update() call), also
when the guess was correct. averaged() returns, for every feature/class,
the mean of the post-update weight snapshots over all ticks so far; the
lazy total/timestamp bookkeeping avoids touching untouched weights.
"""


class AveragedPerceptron:
    def __init__(self):
        self.weights: dict[str, dict[str, float]] = {}
        self._totals: dict[tuple[str, str], float] = {}
        self._tstamps: dict[tuple[str, str], int] = {}
        self.ticks = 0

    def score(self, features: list[str], weights: dict[str, dict[str, float]] | None = None) -> dict[str, float]:
        if weights is None:
            weights = self.weights
        scores: dict[str, float] = {}
        for feat in features:
            row = weights.get(feat)
            if not row:
                continue
            for cls, w in row.items():
                scores[cls] = scores.get(cls, 0.0) + w
        return scores

    def predict(self, features: list[str], classes: list[str]) -> str:
        """Highest-scoring class; ties go to the lexicographically smallest.
        `classes` must be sorted ascending."""
        scores = self.score(features)
        best = classes[0]
        best_score = scores.get(best, 0.0)
        for cls in classes[1:]:
            s = scores.get(cls, 0.0)
            if s > best_score:
                best, best_score = cls, s
        return best

    def _shift(self, feat: str, cls: str, delta: float) -> None:
        key = (feat, cls)
        row = self.weights.setdefault(feat, {})
        current = row.get(cls, 0.0)
        # Credit the outgoing weight for the ticks it was in force.
        self._totals[key] = self._totals.get(key, 0.0) + (
            self.ticks - self._tstamps.get(key, 0)
        ) * current
        self._tstamps[key] = self.ticks
        row[cls] = current + delta

    def update(self, truth: str, guess: str, features: list[str]) -> None:
        self.ticks += 1
        if truth == guess:
            return
        for feat in features:
            self._shift(feat, truth, 1.0)
            self._shift(feat, guess, -1.0)

    def averaged(self) -> dict[str, dict[str, float]]:
        """Mean of per-tick post-update weight snapshots (non-destructive)."""
        if self.ticks == 0:
            return {f: dict(row) for f, row in self.weights.items()}
        out: dict[str, dict[str, float]] = {}
        for feat, row in self.weights.items():
            arow: dict[str, float] = {}
            for cls, w in row.items():
                key = (feat, cls)
                total = self._totals.get(key, 0.0)
                # The weight set at tick t is in force for snapshots t..now.
                total += (self.ticks - self._tstamps.get(key, 0) + 1) * w
                if total != 0.0:
                    arow[cls] = total / self.ticks
            if arow:
                out[feat] = arow
        return out


def predict_with(weights: dict[str, dict[str, float]], features: list[str], classes: list[str]) -> str:
    """Argmax over a frozen weight table; same tie rule as predict()."""
    scores: dict[str, float] = {}
    for feat in features:
        row = weights.get(feat)
        if not row:
            continue
        for cls, w in row.items():
            scores[cls] = scores.get(cls, 0.0) + w
    best = classes[0]
    best_score = scores.get(best, 0.0)
    for cls in classes[1:]:
        s = scores.get(cls, 0.0)
        if s > best_score:
            best, best_score = cls, s
    return best
