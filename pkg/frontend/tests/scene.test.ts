// Scene construction (headless three.js): monotone visual encodings, stable
// colors, pick plumbing, and node/edge counts from the demo fixture.

import { describe, expect, it } from "vitest";

import { protocolColor, protocolColorHex, protocolHue } from "../src/colors.js";
import { layoutGraph } from "../src/layout.js";
import {
  TopologyScene,
  dominantProtocol,
  edgeIntensity,
  edgeWidth,
  glowPulse,
  nodeRadius,
} from "../src/scene.js";
import { fixture } from "./mock_server.js";

describe("visual encodings", () => {
  it("node radius strictly increases with packet count", () => {
    const counts = [1, 2, 5, 10, 40, 153, 1000, 50000];
    const radii = counts.map(nodeRadius);
    for (let i = 1; i < radii.length; i++) {
      expect(radii[i]).toBeGreaterThan(radii[i - 1]);
    }
  });

  it("edge width and intensity are monotone in packet count", () => {
    const counts = [1, 3, 10, 100, 4000];
    const widths = counts.map(edgeWidth);
    const intensities = counts.map((c) => edgeIntensity(c, 4000));
    for (let i = 1; i < counts.length; i++) {
      expect(widths[i]).toBeGreaterThan(widths[i - 1]);
      expect(intensities[i]).toBeGreaterThan(intensities[i - 1]);
    }
    expect(Math.max(...intensities)).toBeLessThanOrEqual(1);
  });

  it("glow pulse breathes around 1 with a small amplitude", () => {
    let lo = Infinity;
    let hi = -Infinity;
    for (let t = 0; t < 6; t += 0.05) {
      const v = glowPulse(t);
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
    expect(lo).toBeGreaterThan(0.9);
    expect(hi).toBeLessThan(1.1);
    expect(hi).toBeGreaterThan(1.0);
  });
});

describe("protocol colors", () => {
  it("are stable across calls and sessions", () => {
    expect(protocolHue("dns")).toBe(protocolHue("dns"));
    expect(protocolColor("tcp")).toBe(protocolColor("tcp"));
    expect(protocolColorHex("tls")).toBe(protocolColorHex("tls"));
  });

  it("give the demo's ten protocols distinct hues", () => {
    const labels = ["arp", "dhcp", "dns", "ftp", "http", "icmp", "ntp", "ssh", "tcp", "tls"];
    const hues = new Set(labels.map(protocolHue));
    expect(hues.size).toBe(labels.length);
  });

  it("hex colors are valid 24-bit values", () => {
    for (const label of ["dns", "tcp", "a-very-long-protocol-name"]) {
      const hex = protocolColorHex(label);
      expect(hex).toBeGreaterThanOrEqual(0);
      expect(hex).toBeLessThanOrEqual(0xffffff);
    }
  });
});

describe("dominantProtocol", () => {
  it("prefers the most frequent protocol per the legend order", () => {
    expect(dominantProtocol(["tcp", "http"], ["dns", "http", "tcp"])).toBe("http");
    expect(dominantProtocol(["arp"], ["dns", "http"])).toBe("arp");
    expect(dominantProtocol([], ["dns"])).toBe("data");
  });
});

describe("TopologyScene", () => {
  const demo = fixture("topology_demo.json");
  const positions = layoutGraph({
    nodes: demo.nodes.map((n: { id: string }) => ({ id: n.id })),
    edges: demo.edges.map((e: { a: string; b: string }) => ({ a: e.a, b: e.b })),
  });

  it("builds one mesh per node from the demo fixture", () => {
    const scene = new TopologyScene({ trafficLabels: false });
    scene.build(demo, positions);
    expect(scene.nodeMeshes.size).toBe(20);
  });

  it("mesh radii are ordered like packet counts", () => {
    const scene = new TopologyScene({ trafficLabels: false });
    scene.build(demo, positions);
    const byId = new Map(demo.nodes.map((n: { id: string; packets: number }) => [n.id, n.packets]));
    const entries = [...scene.nodeMeshes.entries()].map(([id, mesh]) => ({
      packets: byId.get(id)!,
      // SphereGeometry radius parameter
      radius: (mesh.geometry as { parameters: { radius: number } }).parameters.radius,
    }));
    entries.sort((a, b) => a.packets - b.packets);
    for (let i = 1; i < entries.length; i++) {
      if (entries[i].packets > entries[i - 1].packets) {
        expect(entries[i].radius).toBeGreaterThan(entries[i - 1].radius);
      }
    }
  });

  it("selection raises emissive intensity and rebuild resets it", () => {
    const scene = new TopologyScene({ trafficLabels: false });
    scene.build(demo, positions);
    scene.setSelected("10.0.1.200");
    const mesh = scene.nodeMeshes.get("10.0.1.200")!;
    const material = mesh.material as { emissiveIntensity: number };
    expect(material.emissiveIntensity).toBeGreaterThan(0.5);
    scene.setSelected(null);
    expect(material.emissiveIntensity).toBeLessThan(0.5);
  });

  it("raycast pick at a node's screen position returns that node", async () => {
    const THREE = await import("three");
    const scene = new TopologyScene({ trafficLabels: false });
    scene.build(demo, positions);
    const target = positions.get("10.0.1.200")!;
    const camera = new THREE.PerspectiveCamera(55, 1, 0.1, 5000);
    camera.position.set(target.x, target.y, target.z + 120);
    camera.lookAt(target.x, target.y, target.z);
    camera.updateMatrixWorld();
    expect(scene.pick(0, 0, camera)).toBe("10.0.1.200");
    // far off-axis: nothing to hit
    expect(scene.pick(0.98, 0.98, camera)).not.toBe("10.0.1.200");
  });

  it("animate eases scales toward the pulse without exploding", () => {
    const scene = new TopologyScene({ trafficLabels: false });
    scene.build(demo, positions);
    for (let t = 0; t < 4; t += 1 / 60) scene.animate(t);
    for (const mesh of scene.nodeMeshes.values()) {
      expect(mesh.scale.x).toBeGreaterThan(0.85);
      expect(mesh.scale.x).toBeLessThan(1.5);
    }
  });
});
