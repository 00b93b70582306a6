/**
 * Wireframe SVG for generated layouts.
 *
 * Rectangle coordinates are exactly the API response values scaled by the
 * viewport; containers are painted under their children (depth order),
 * matching the server-side renderer.
 */
import { ROOT_ID } from "./graph.js";
export const VIEWPORT = [360, 640];
const NUM_CLASSES = 24;
export function classColor(classId, container) {
    const hue = Math.floor((classId * 360) / NUM_CLASSES);
    return `hsl(${hue}, 55%, ${container ? "38%" : "62%"})`;
}
function depthOf(id, parents) {
    let depth = 0;
    let cur = id;
    const seen = new Set();
    while (cur !== ROOT_ID && !seen.has(cur)) {
        seen.add(cur);
        cur = parents.get(cur) ?? ROOT_ID;
        depth += 1;
    }
    return depth;
}
export function renderWireframe(boxes, parents, classIds, containers, viewport = VIEWPORT) {
    const [vw, vh] = viewport;
    const parts = [
        `<svg xmlns="http://www.w3.org/2000/svg" width="${vw}" height="${vh}" viewBox="0 0 ${vw} ${vh}">`,
        `<rect x="0" y="0" width="${vw}" height="${vh}" fill="white" stroke="#333"/>`,
    ];
    const ordered = [...boxes].sort((a, b) => depthOf(a.id, parents) - depthOf(b.id, parents) || a.id - b.id);
    for (const box of ordered) {
        const color = classColor(classIds.get(box.class) ?? 0, containers.has(box.class));
        const x = (box.x * vw).toFixed(2);
        const y = (box.y * vh).toFixed(2);
        const w = (box.w * vw).toFixed(2);
        const h = (box.h * vh).toFixed(2);
        parts.push(`<rect x="${x}" y="${y}" width="${w}" height="${h}" fill="${color}" ` +
            `fill-opacity="0.35" stroke="${color}" stroke-width="1.5"/>`);
        const label = `${box.class}[${box.id}]`;
        parts.push(`<text x="${(box.x * vw + 3).toFixed(2)}" y="${(box.y * vh + 11).toFixed(2)}" ` +
            `font-family="monospace" font-size="9" fill="#111">${label}</text>`);
    }
    parts.push("</svg>");
    return parts.join("\n");
}
