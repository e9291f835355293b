// Deterministic 3D force-directed layout: seeded initial placement, spring
// attraction along edges, global repulsion, mild centering, fixed iteration
// budget, then a minimum-separation pass. Same graph + seed => same positions.

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface LayoutInput {
  nodes: { id: string }[];
  edges: { a: string; b: string }[];
}

export interface LayoutOptions {
  seed?: number;
  iterations?: number;
  spread?: number;
  minSeparation?: number;
}

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a += 0x6d2b79f5;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const DEFAULTS: Required<LayoutOptions> = {
  seed: 0x70b0,
  iterations: 260,
  spread: 60,
  minSeparation: 6,
};

export function layoutGraph(input: LayoutInput, options: LayoutOptions = {}): Map<string, Vec3> {
  const opts = { ...DEFAULTS, ...options };
  const n = input.nodes.length;
  const out = new Map<string, Vec3>();
  if (n === 0) return out;
  if (n === 1) {
    out.set(input.nodes[0].id, { x: 0, y: 0, z: 0 });
    return out;
  }

  const rand = mulberry32(opts.seed);
  const index = new Map<string, number>();
  input.nodes.forEach((node, i) => index.set(node.id, i));
  const px = new Float64Array(n);
  const py = new Float64Array(n);
  const pz = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    px[i] = (rand() - 0.5) * opts.spread;
    py[i] = (rand() - 0.5) * opts.spread;
    pz[i] = (rand() - 0.5) * opts.spread;
  }

  const links: Array<[number, number]> = [];
  for (const edge of input.edges) {
    const a = index.get(edge.a);
    const b = index.get(edge.b);
    if (a !== undefined && b !== undefined && a !== b) links.push([a, b]);
  }

  const k = opts.spread / Math.cbrt(n); // ideal pairwise distance
  const fx = new Float64Array(n);
  const fy = new Float64Array(n);
  const fz = new Float64Array(n);

  for (let iter = 0; iter < opts.iterations; iter++) {
    fx.fill(0);
    fy.fill(0);
    fz.fill(0);
    // pairwise repulsion (n <= 80, the quadratic pass is trivial)
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = px[i] - px[j];
        let dy = py[i] - py[j];
        let dz = pz[i] - pz[j];
        let d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < 1e-6) {
          dx = (rand() - 0.5) * 0.01;
          dy = (rand() - 0.5) * 0.01;
          dz = (rand() - 0.5) * 0.01;
          d2 = dx * dx + dy * dy + dz * dz;
        }
        const d = Math.sqrt(d2);
        const force = (k * k) / d2;
        const ux = (dx / d) * force;
        const uy = (dy / d) * force;
        const uz = (dz / d) * force;
        fx[i] += ux;
        fy[i] += uy;
        fz[i] += uz;
        fx[j] -= ux;
        fy[j] -= uy;
        fz[j] -= uz;
      }
    }
    // spring attraction along edges
    for (const [a, b] of links) {
      const dx = px[a] - px[b];
      const dy = py[a] - py[b];
      const dz = pz[a] - pz[b];
      const d = Math.sqrt(dx * dx + dy * dy + dz * dz) || 1e-3;
      const force = (d * d) / k / d;
      fx[a] -= dx * force * 0.05;
      fy[a] -= dy * force * 0.05;
      fz[a] -= dz * force * 0.05;
      fx[b] += dx * force * 0.05;
      fy[b] += dy * force * 0.05;
      fz[b] += dz * force * 0.05;
    }
    // mild centering keeps disconnected components from drifting away
    const temperature = opts.spread * 0.08 * (1 - iter / opts.iterations) + 0.2;
    for (let i = 0; i < n; i++) {
      fx[i] -= px[i] * 0.01;
      fy[i] -= py[i] * 0.01;
      fz[i] -= pz[i] * 0.01;
      const mag = Math.sqrt(fx[i] * fx[i] + fy[i] * fy[i] + fz[i] * fz[i]) || 1e-9;
      const step = Math.min(mag, temperature) / mag;
      px[i] += fx[i] * step;
      py[i] += fy[i] * step;
      pz[i] += fz[i] * step;
    }
  }

  // enforce a minimum separation so labels and picks never fuse
  for (let pass = 0; pass < 20; pass++) {
    let moved = false;
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = px[i] - px[j];
        let dy = py[i] - py[j];
        let dz = pz[i] - pz[j];
        let d = Math.sqrt(dx * dx + dy * dy + dz * dz);
        if (d < 1e-6) {
          dx = rand() - 0.5;
          dy = rand() - 0.5;
          dz = rand() - 0.5;
          d = Math.sqrt(dx * dx + dy * dy + dz * dz);
        }
        if (d < opts.minSeparation) {
          const push = (opts.minSeparation - d) / 2 / d;
          px[i] += dx * push;
          py[i] += dy * push;
          pz[i] += dz * push;
          px[j] -= dx * push;
          py[j] -= dy * push;
          pz[j] -= dz * push;
          moved = true;
        }
      }
    }
    if (!moved) break;
  }

  input.nodes.forEach((node, i) => out.set(node.id, { x: px[i], y: py[i], z: pz[i] }));
  return out;
}
