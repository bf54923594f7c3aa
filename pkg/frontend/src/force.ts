/** A tiny force simulation for the metric graph layout. Purely cosmetic:
 * positions carry no meaning, all quantitative encodings (radius, stroke)
 * come from scales.ts. Deterministic for a fixed node order. */

export interface ForceNode {
  id: string;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

export interface ForceLink {
  source: string;
  target: string;
}

export function initialPositions(ids: string[], width: number, height: number): ForceNode[] {
  // seeds on a circle; golden-angle spacing avoids early overlaps
  const cx = width / 2;
  const cy = height / 2;
  const r = Math.min(width, height) / 3;
  return ids.map((id, i) => ({
    id,
    x: cx + r * Math.cos(i * 2.399963),
    y: cy + r * Math.sin(i * 2.399963),
    vx: 0,
    vy: 0,
  }));
}

export function step(
  nodes: ForceNode[],
  links: ForceLink[],
  width: number,
  height: number,
  options = { repulsion: 4000, springLength: 120, springK: 0.02, damping: 0.85 },
): void {
  const byId = new Map(nodes.map((n) => [n.id, n]));
  for (let i = 0; i < nodes.length; i++) {
    for (let j = i + 1; j < nodes.length; j++) {
      const a = nodes[i];
      const b = nodes[j];
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d2 = Math.max(dx * dx + dy * dy, 25);
      const f = options.repulsion / d2;
      const d = Math.sqrt(d2);
      a.vx -= (f * dx) / d;
      a.vy -= (f * dy) / d;
      b.vx += (f * dx) / d;
      b.vy += (f * dy) / d;
    }
  }
  for (const link of links) {
    const a = byId.get(link.source);
    const b = byId.get(link.target);
    if (!a || !b) continue;
    const dx = b.x - a.x;
    const dy = b.y - a.y;
    const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
    const stretch = (d - options.springLength) * options.springK;
    a.vx += (stretch * dx) / d;
    a.vy += (stretch * dy) / d;
    b.vx -= (stretch * dx) / d;
    b.vy -= (stretch * dy) / d;
  }
  for (const n of nodes) {
    n.vx *= options.damping;
    n.vy *= options.damping;
    n.x = Math.min(Math.max(n.x + n.vx, 20), width - 20);
    n.y = Math.min(Math.max(n.y + n.vy, 20), height - 20);
  }
}

export function layout(ids: string[], links: ForceLink[], width: number, height: number,
                       iterations = 150): ForceNode[] {
  const nodes = initialPositions(ids, width, height);
  for (let i = 0; i < iterations; i++) {
    step(nodes, links, width, height);
  }
  return nodes;
}
