// Client-side mirror of the server's penalized-argmax alignment. The slider
// recomputes links from the similarity matrix already in the session payload,
// so moving it costs zero HTTP requests.
//
// Parity is exact, not approximate: the arithmetic below keeps the server's
// operation order (one multiply, one subtract, plain comparisons) so IEEE
// doubles come out bit-identical on both sides. Do not "simplify" the math.

import type { AlignmentLink } from "./types.js";

export function scoreMatrix(
  base: number[][],
  origRelPos: number[],
  simpRelPos: number[],
  lambda: number,
): number[][] {
  if (base.length !== origRelPos.length) {
    throw new Error("orig_rel_pos length does not match matrix rows");
  }
  if (base.length > 0 && (base[0] as number[]).length !== simpRelPos.length) {
    throw new Error("simp_rel_pos length does not match matrix cols");
  }
  return origRelPos.map((origPos, i) =>
    simpRelPos.map(
      (simpPos, j) => (base[i] as number[])[j]! - Math.abs(origPos - simpPos) * lambda,
    ),
  );
}

export function assignLinks(
  scored: number[][],
  origRelPos: number[],
  simpRelPos: number[],
  base?: number[][],
): AlignmentLink[] {
  if (scored.length === 0 || (scored[0] as number[]).length === 0) {
    throw new Error("score matrix must be non-empty");
  }
  const nRows = scored.length;
  const nCols = (scored[0] as number[]).length;
  const links: AlignmentLink[] = [];
  for (let j = 0; j < nCols; j++) {
    let bestI = 0;
    let bestScore = (scored[0] as number[])[j]!;
    let bestDist = Math.abs(origRelPos[0]! - simpRelPos[j]!);
    for (let i = 1; i < nRows; i++) {
      const s = (scored[i] as number[])[j]!;
      if (s > bestScore) {
        bestI = i;
        bestScore = s;
        bestDist = Math.abs(origRelPos[i]! - simpRelPos[j]!);
      } else if (s === bestScore) {
        const d = Math.abs(origRelPos[i]! - simpRelPos[j]!);
        if (d < bestDist) {
          bestI = i;
          bestDist = d;
        }
      }
    }
    links.push({
      simplified_index: j,
      original_index: bestI,
      score: bestScore,
      base_similarity: base !== undefined ? (base[bestI] as number[])[j]! : bestScore,
    });
  }
  return links;
}

export function recomputeAlignment(
  matrixValues: number[][],
  origRelPos: number[],
  simpRelPos: number[],
  lambdaUi: number,
): AlignmentLink[] {
  const scored = scoreMatrix(matrixValues, origRelPos, simpRelPos, lambdaUi);
  return assignLinks(scored, origRelPos, simpRelPos, matrixValues);
}

export function crossingCount(links: AlignmentLink[]): number {
  const ordered = [...links].sort((a, b) => a.simplified_index - b.simplified_index);
  let count = 0;
  for (let x = 0; x < ordered.length; x++) {
    for (let y = x + 1; y < ordered.length; y++) {
      if (ordered[x]!.original_index > ordered[y]!.original_index) count++;
    }
  }
  return count;
}
