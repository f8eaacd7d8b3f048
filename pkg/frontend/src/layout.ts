/**
 * Deterministic force-directed layout.
 *
 * Positions are seeded from a hash of each node's address, so the same
 * subgraph always lands in the same arrangement across reloads — no
 * randomness, no dependency on insertion order.
 */

export interface Point {
  x: number;
  y: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  iterations?: number;
  springLength?: number;
}

/** FNV-1a 32-bit hash of a string; stable across sessions. */
export function hashSeed(value: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < value.length; i++) {
    h ^= value.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

/** Initial position derived purely from the address hash. */
export function seededPosition(address: string, width: number, height: number): Point {
  const h = hashSeed(address);
  // split the hash into two 16-bit halves for x and y
  const hx = h & 0xffff;
  const hy = (h >>> 16) & 0xffff;
  return {
    x: (0.1 + 0.8 * (hx / 0xffff)) * width,
    y: (0.1 + 0.8 * (hy / 0xffff)) * height,
  };
}

/**
 * Spring-embedder layout over the given vertex/edge lists.
 *
 * Small graphs get full pairwise repulsion; beyond a few hundred nodes
 * repulsion is skipped (springs plus the seeded spread carry the view)
 * to keep the UI responsive near the server's 2,000-vertex cap.
 */
export function forceLayout(
  vertices: string[],
  edges: Array<[string, string]>,
  options: LayoutOptions,
): Map<string, Point> {
  const { width, height } = options;
  const iterations = options.iterations ?? 120;
  const springLength = options.springLength ?? Math.min(width, height) / 6;

  const order = [...vertices].sort(); // order-insensitive output
  const positions = new Map<string, Point>();
  for (const v of order) {
    positions.set(v, seededPosition(v, width, height));
  }

  const springs: Array<[string, string]> = [];
  for (const [a, b] of edges) {
    if (a !== b && positions.has(a) && positions.has(b)) {
      springs.push([a, b]);
    }
  }

  const repulse = order.length <= 400;
  const repulsion = springLength * springLength;

  for (let iter = 0; iter < iterations; iter++) {
    const cool = 1 - iter / iterations;
    const shift = new Map<string, Point>();
    for (const v of order) {
      shift.set(v, { x: 0, y: 0 });
    }

    if (repulse) {
      for (let i = 0; i < order.length; i++) {
        for (let j = i + 1; j < order.length; j++) {
          const a = positions.get(order[i])!;
          const b = positions.get(order[j])!;
          let dx = a.x - b.x;
          let dy = a.y - b.y;
          let d2 = dx * dx + dy * dy;
          if (d2 < 0.01) {
            // coincident seeds: nudge apart along a hash-derived direction
            const angle = (hashSeed(order[i] + order[j]) % 360) * (Math.PI / 180);
            dx = Math.cos(angle);
            dy = Math.sin(angle);
            d2 = 1;
          }
          const force = repulsion / d2;
          const da = shift.get(order[i])!;
          const db = shift.get(order[j])!;
          da.x += dx * force * 0.01;
          da.y += dy * force * 0.01;
          db.x -= dx * force * 0.01;
          db.y -= dy * force * 0.01;
        }
      }
    }

    for (const [a, b] of springs) {
      const pa = positions.get(a)!;
      const pb = positions.get(b)!;
      const dx = pb.x - pa.x;
      const dy = pb.y - pa.y;
      const dist = Math.max(Math.sqrt(dx * dx + dy * dy), 0.1);
      const pull = ((dist - springLength) / dist) * 0.05;
      const sa = shift.get(a)!;
      const sb = shift.get(b)!;
      sa.x += dx * pull;
      sa.y += dy * pull;
      sb.x -= dx * pull;
      sb.y -= dy * pull;
    }

    for (const v of order) {
      const p = positions.get(v)!;
      const s = shift.get(v)!;
      p.x = Math.min(Math.max(p.x + s.x * cool, 0), width);
      p.y = Math.min(Math.max(p.y + s.y * cool, 0), height);
    }
  }

  return positions;
}
