/** Minimal CSV reader for dataset uploads: header row, numeric feature
 * columns, optional integer `label` column. No quoting support — the
 * interchange files the service writes never need it. */

export interface ParsedDataset {
    points: number[][];
    labels?: number[];
}

export function parseDatasetCsv(text: string): ParsedDataset {
    const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
    if (lines.length < 2) throw new Error("CSV needs a header and data rows");
    const header = lines[0].split(",").map((h) => h.trim());
    const labelIdx = header.indexOf("label");
    const points: number[][] = [];
    const labels: number[] = [];
    for (let i = 1; i < lines.length; i++) {
        const cells = lines[i].split(",");
        if (cells.length !== header.length) {
            throw new Error(`row ${i + 1}: expected ${header.length} cells`);
        }
        const row: number[] = [];
        cells.forEach((cell, j) => {
            if (j === labelIdx) {
                labels.push(parseInt(cell, 10));
            } else {
                const v = parseFloat(cell);
                if (Number.isNaN(v)) {
                    throw new Error(`row ${i + 1}: non-numeric cell ${cell}`);
                }
                row.push(v);
            }
        });
        points.push(row);
    }
    return labelIdx >= 0 ? { points, labels } : { points };
}
