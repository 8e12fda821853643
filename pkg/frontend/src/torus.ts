/** Wrap arithmetic for the toroidal map: panning, picking, tiling. */

/** Positive modulo: wrap(v, p) is always in [0, p). */
export function wrap(v: number, period: number): number {
    const r = v % period;
    return r < 0 ? r + period : r;
}

/** Shortest signed difference a-b on a circle of the given period. */
export function wrapDelta(a: number, b: number, period: number): number {
    let d = (a - b) % period;
    if (d > period / 2) d -= period;
    if (d < -period / 2) d += period;
    return d;
}

/** Toroidal Euclidean distance between two points. */
export function torusDistance(ax: number, ay: number, bx: number, by: number,
                              width: number, height: number): number {
    const dx = Math.abs(wrapDelta(ax, bx, width));
    const dy = Math.abs(wrapDelta(ay, by, height));
    return Math.hypot(dx, dy);
}

/**
 * Index of the point nearest to (x, y) on the torus, or -1 when none is
 * within maxDist.
 */
export function nearestPoint(xs: number[], ys: number[], x: number, y: number,
                             width: number, height: number,
                             maxDist: number): number {
    let best = -1;
    let bestDist = maxDist;
    for (let i = 0; i < xs.length; i++) {
        const d = torusDistance(xs[i], ys[i], x, y, width, height);
        if (d < bestDist) {
            bestDist = d;
            best = i;
        }
    }
    return best;
}

/**
 * Screen-to-world transform for a panned toroidal canvas: the world
 * coordinate under a canvas pixel, already wrapped into the map.
 */
export function screenToWorld(px: number, py: number, panX: number,
                              panY: number, scale: number, width: number,
                              height: number): { x: number; y: number } {
    return {
        x: wrap(px / scale - panX, width),
        y: wrap(py / scale - panY, height),
    };
}

/**
 * The 3x3 tile offsets (in world units) that cover a viewport of the
 * given size for any pan value; drawing each copy makes panning seamless.
 */
export function tileOffsets(width: number, height: number):
        Array<{ dx: number; dy: number }> {
    const offsets = [];
    for (const dy of [-height, 0, height]) {
        for (const dx of [-width, 0, width]) {
            offsets.push({ dx, dy });
        }
    }
    return offsets;
}
