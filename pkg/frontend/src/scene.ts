// Three.js scene construction from a topology snapshot: hosts as spheres
// whose radius grows with packet count, conversations as cylinders whose
// thickness and brightness grow with traffic, plus idle glow pulsing.
// Scene-graph math runs headless; only the renderer needs WebGL.

import * as THREE from "three";

import { TopologyResponse } from "./api.js";
import { protocolColorHex } from "./colors.js";
import { Vec3 } from "./layout.js";

export function nodeRadius(packets: number): number {
  return 1.2 + 0.55 * Math.log2(1 + Math.max(0, packets));
}

export function edgeWidth(packets: number): number {
  return 0.12 + 0.1 * Math.log2(1 + Math.max(0, packets));
}

export function edgeIntensity(packets: number, maxPackets: number): number {
  if (maxPackets <= 0) return 0.4;
  return 0.35 + 0.65 * Math.min(1, Math.log2(1 + packets) / Math.log2(1 + maxPackets));
}

/** Subtle breathing factor for idle nodes; period 3 s, +-6 %. */
export function glowPulse(timeSeconds: number): number {
  return 1 + 0.06 * Math.sin((timeSeconds * 2 * Math.PI) / 3);
}

export function dominantProtocol(protocols: string[], legendOrder: string[]): string {
  for (const label of legendOrder) {
    if (protocols.includes(label)) return label;
  }
  return protocols[0] ?? "data";
}

export interface NodeVisual {
  id: string;
  radius: number;
  color: number;
  packets: number;
}

export interface SceneOptions {
  trafficLabels?: boolean; // needs a 2D canvas; disable for headless runs
}

export class TopologyScene {
  readonly scene = new THREE.Scene();
  readonly nodeMeshes = new Map<string, THREE.Mesh>();
  private nodeGroup = new THREE.Group();
  private edgeGroup = new THREE.Group();
  private labelGroup = new THREE.Group();
  private baseScale = new Map<string, number>();
  private selected: string | null = null;
  private raycaster = new THREE.Raycaster();
  private trafficLabels: boolean;

  constructor(options: SceneOptions = {}) {
    this.trafficLabels = options.trafficLabels ?? true;
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.7));
    const key = new THREE.DirectionalLight(0xffffff, 1.4);
    key.position.set(80, 140, 60);
    this.scene.add(key);
    this.scene.add(this.nodeGroup);
    this.scene.add(this.edgeGroup);
    this.scene.add(this.labelGroup);
  }

  nodeVisuals(topology: TopologyResponse): NodeVisual[] {
    const legendOrder = topology.legend.map((e) => e.label);
    return topology.nodes.map((n) => ({
      id: n.id,
      radius: nodeRadius(n.packets),
      color: protocolColorHex(dominantProtocol(n.protocols, legendOrder)),
      packets: n.packets,
    }));
  }

  build(topology: TopologyResponse, positions: Map<string, Vec3>): void {
    this.clearGroup(this.nodeGroup);
    this.clearGroup(this.edgeGroup);
    this.clearGroup(this.labelGroup);
    this.nodeMeshes.clear();
    this.baseScale.clear();

    for (const visual of this.nodeVisuals(topology)) {
      const pos = positions.get(visual.id);
      if (!pos) continue;
      const geometry = new THREE.SphereGeometry(visual.radius, 24, 18);
      const material = new THREE.MeshStandardMaterial({
        color: visual.color,
        roughness: 0.35,
        metalness: 0.15,
        emissive: visual.color,
        emissiveIntensity: 0.22,
      });
      const mesh = new THREE.Mesh(geometry, material);
      mesh.position.set(pos.x, pos.y, pos.z);
      mesh.userData.hostId = visual.id;
      mesh.userData.packets = visual.packets;
      this.nodeGroup.add(mesh);
      this.nodeMeshes.set(visual.id, mesh);
      this.baseScale.set(visual.id, 1);
    }

    const maxPackets = Math.max(1, ...topology.edges.map((e) => e.packets));
    for (const edge of topology.edges) {
      const a = positions.get(edge.a);
      const b = positions.get(edge.b);
      if (!a || !b) continue;
      const start = new THREE.Vector3(a.x, a.y, a.z);
      const end = new THREE.Vector3(b.x, b.y, b.z);
      const length = start.distanceTo(end);
      if (length < 1e-6) continue;
      const geometry = new THREE.CylinderGeometry(
        edgeWidth(edge.packets), edgeWidth(edge.packets), length, 6, 1, true,
      );
      const material = new THREE.MeshBasicMaterial({
        color: 0x7fb4ff,
        transparent: true,
        opacity: edgeIntensity(edge.packets, maxPackets),
      });
      const cylinder = new THREE.Mesh(geometry, material);
      cylinder.position.copy(start).add(end).multiplyScalar(0.5);
      cylinder.quaternion.setFromUnitVectors(
        new THREE.Vector3(0, 1, 0),
        end.clone().sub(start).normalize(),
      );
      cylinder.userData.edge = { a: edge.a, b: edge.b, packets: edge.packets, bytes: edge.bytes };
      this.edgeGroup.add(cylinder);
      const label = this.makeTrafficLabel(edge.packets, edge.bytes);
      if (label) {
        label.position.copy(cylinder.position);
        this.labelGroup.add(label);
      }
    }
  }

  /** Canvas-backed sprite with "N pkts / M B"; null when 2D canvas is unavailable. */
  private makeTrafficLabel(packets: number, bytes: number): THREE.Sprite | null {
    if (!this.trafficLabels || typeof document === "undefined") return null;
    const canvas = document.createElement("canvas");
    let ctx: CanvasRenderingContext2D | null = null;
    try {
      ctx = canvas.getContext("2d");
    } catch {
      return null;
    }
    if (!ctx) return null;
    canvas.width = 128;
    canvas.height = 32;
    ctx.font = "16px system-ui, sans-serif";
    ctx.fillStyle = "rgba(200, 220, 255, 0.9)";
    ctx.textAlign = "center";
    ctx.fillText(`${packets} pkts / ${formatBytes(bytes)}`, 64, 21);
    const texture = new THREE.CanvasTexture(canvas);
    const sprite = new THREE.Sprite(
      new THREE.SpriteMaterial({ map: texture, transparent: true, depthWrite: false }),
    );
    sprite.scale.set(14, 3.5, 1);
    return sprite;
  }

  setSelected(id: string | null): void {
    this.selected = id;
    for (const [hostId, mesh] of this.nodeMeshes) {
      const material = mesh.material as THREE.MeshStandardMaterial;
      material.emissiveIntensity = hostId === id ? 0.85 : 0.22;
      this.baseScale.set(hostId, hostId === id ? 1.35 : 1);
    }
  }

  /** Eased approach toward the selection scale plus idle glow pulsing. */
  animate(timeSeconds: number): void {
    const pulse = glowPulse(timeSeconds);
    for (const [hostId, mesh] of this.nodeMeshes) {
      const targetScale = (this.baseScale.get(hostId) ?? 1) * (hostId === this.selected ? 1 : pulse);
      const current = mesh.scale.x;
      const eased = current + (targetScale - current) * 0.18;
      mesh.scale.setScalar(eased);
    }
  }

  /** Raycast pick: NDC coordinates -> host id, or null. */
  pick(ndcX: number, ndcY: number, camera: THREE.Camera): string | null {
    this.scene.updateMatrixWorld(true); // picks must work before the first render
    this.raycaster.setFromCamera(new THREE.Vector2(ndcX, ndcY), camera);
    const hits = this.raycaster.intersectObjects([...this.nodeMeshes.values()], false);
    return hits.length ? (hits[0].object.userData.hostId as string) : null;
  }

  private clearGroup(group: THREE.Group): void {
    for (const child of [...group.children]) {
      group.remove(child);
      const mesh = child as THREE.Mesh;
      mesh.geometry?.dispose?.();
      const material = mesh.material as THREE.Material | undefined;
      material?.dispose?.();
    }
  }
}

export function formatBytes(n: number): string {
  if (n < 1024) return `${n} B`;
  if (n < 1024 * 1024) return `${(n / 1024).toFixed(1)} KB`;
  return `${(n / (1024 * 1024)).toFixed(1)} MB`;
}
