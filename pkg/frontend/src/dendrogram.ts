/**
 * Merge-height panel: the tail of the merge heights as clickable bars.
 * Clicking between two merges picks the k that cuts the hierarchy there;
 * the mapping is pure so it can be tested without a DOM.
 */

import { DendrogramDoc } from "./api.js";

/** Number of clusters produced by cutting just below merge index i
 * (0-based, merges in ascending-height order, n leaves). */
export function kForMergeIndex(nLeaves: number, mergeIndex: number): number {
    return nLeaves - mergeIndex;
}

/** The merge heights shown in the panel: the top `count` merges. */
export function panelHeights(dendro: DendrogramDoc,
                             count: number): Array<{ index: number;
                                                     height: number }> {
    const n = dendro.merges.length;
    const start = Math.max(0, n - count);
    const out = [];
    for (let i = start; i < n; i++) {
        out.push({ index: i, height: dendro.merges[i].height });
    }
    return out;
}

export class DendrogramPanel {
    onPick: ((k: number) => void) | null = null;
    private dendro: DendrogramDoc | null = null;
    private bars = 30;

    constructor(private canvas: HTMLCanvasElement) {
        canvas.addEventListener("click", (ev) => this.handleClick(ev));
    }

    set(dendro: DendrogramDoc | null): void {
        this.dendro = dendro;
        this.render();
    }

    private geometry() {
        const d = this.dendro!;
        const shown = panelHeights(d, this.bars);
        const w = this.canvas.width / shown.length;
        const hMax = shown[shown.length - 1]?.height || 1;
        return { shown, w, hMax };
    }

    render(): void {
        const ctx = this.canvas.getContext("2d")!;
        ctx.fillStyle = "#14171c";
        ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
        if (!this.dendro || this.dendro.merges.length === 0) return;
        const { shown, w, hMax } = this.geometry();
        const H = this.canvas.height;
        ctx.fillStyle = "#4f8fd0";
        shown.forEach((m, i) => {
            const barH = hMax > 0 ? (m.height / hMax) * (H - 18) : 0;
            ctx.fillRect(i * w + 1, H - barH, Math.max(1, w - 2), barH);
        });
        ctx.fillStyle = "#aab4c0";
        ctx.font = "10px sans-serif";
        ctx.fillText(`top ${shown.length} merges (${this.dendro.mode}) — ` +
                     "click a bar to cut there", 4, 12);
    }

    private handleClick(ev: MouseEvent): void {
        if (!this.dendro || !this.onPick) return;
        const rect = this.canvas.getBoundingClientRect();
        const x = (ev.clientX - rect.left) *
            (this.canvas.width / rect.width);
        const { shown, w } = this.geometry();
        const bar = Math.min(shown.length - 1, Math.max(0, Math.floor(x / w)));
        const nLeaves = this.dendro.merges.length + 1;
        this.onPick(kForMergeIndex(nLeaves, shown[bar].index));
    }
}
