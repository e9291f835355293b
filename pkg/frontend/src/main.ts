// Application entry point: wires the store, 3D topology, packet list,
// filter bar, legend, conversation panel, and capture loading together.
// The topology view is the landing surface; the packet list is a tab away.

import * as THREE from "three";

import { ApiClient } from "./api.js";
import { OrbitCamera } from "./camera.js";
import { GestureController } from "./gestures.js";
import { layoutGraph } from "./layout.js";
import { LegendView } from "./legend.js";
import { ConversationPanel } from "./panel.js";
import { TopologyScene } from "./scene.js";
import { AppStore, ViewName } from "./state.js";
import { VirtualPacketList } from "./vlist.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const store = new AppStore(api);

  const canvasHost = el<HTMLDivElement>("topology-view");
  const packetsView = el<HTMLDivElement>("packets-view");
  const filterInput = el<HTMLInputElement>("filter-input");
  const filterError = el<HTMLDivElement>("filter-error");
  const statusBar = el<HTMLDivElement>("status-bar");
  const dropOverlay = el<HTMLDivElement>("drop-overlay");

  // --- three.js renderer -------------------------------------------------
  const scene3d = new TopologyScene();
  const camera = new THREE.PerspectiveCamera(55, 1, 0.1, 5000);
  const orbit = new OrbitCamera(170);
  let renderer: THREE.WebGLRenderer | null = null;
  try {
    renderer = new THREE.WebGLRenderer({ antialias: true, alpha: true });
    renderer.setPixelRatio(window.devicePixelRatio || 1);
    canvasHost.appendChild(renderer.domElement);
  } catch {
    canvasHost.textContent = "WebGL unavailable; packet list remains usable.";
  }

  function resize(): void {
    if (!renderer) return;
    const w = canvasHost.clientWidth || 800;
    const h = canvasHost.clientHeight || 500;
    renderer.setSize(w, h);
    camera.aspect = w / h;
    camera.updateProjectionMatrix();
  }
  window.addEventListener("resize", resize);

  // --- input -------------------------------------------------------------
  const gestures = new GestureController({
    orbit: (dx, dy) => orbit.orbit(dx, dy),
    zoom: (f) => orbit.zoom(f),
    pan: (dx, dy) => orbit.pan(dx, dy),
    tap: (x, y) => {
      if (!renderer) return;
      const rect = renderer.domElement.getBoundingClientRect();
      const ndcX = ((x - rect.left) / rect.width) * 2 - 1;
      const ndcY = -(((y - rect.top) / rect.height) * 2 - 1);
      const hit = scene3d.pick(ndcX, ndcY, camera);
      scene3d.setSelected(hit);
      if (hit) void store.expandHost(hit);
      else store.collapseHost();
    },
  });
  canvasHost.addEventListener("pointerdown", (ev) => {
    canvasHost.setPointerCapture?.(ev.pointerId);
    gestures.pointerDown(ev);
  });
  canvasHost.addEventListener("pointermove", (ev) => gestures.pointerMove(ev));
  canvasHost.addEventListener("pointerup", (ev) => gestures.pointerUp(ev));
  canvasHost.addEventListener("contextmenu", (ev) => ev.preventDefault());
  canvasHost.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    gestures.wheel(ev.deltaY);
  }, { passive: false });
  canvasHost.addEventListener("touchstart", (ev) => {
    ev.preventDefault();
    gestures.touchStart(ev.touches);
  }, { passive: false });
  canvasHost.addEventListener("touchmove", (ev) => {
    ev.preventDefault();
    gestures.touchMove(ev.touches);
  }, { passive: false });
  canvasHost.addEventListener("touchend", (ev) => {
    const changed = ev.changedTouches[0] ?? { clientX: 0, clientY: 0 };
    gestures.touchEnd(ev.touches, { clientX: changed.clientX, clientY: changed.clientY });
  });

  // --- packet list ---------------------------------------------------------
  const vlist = new VirtualPacketList(el<HTMLDivElement>("packet-rows"), (offset, count) =>
    api.packets(offset, count),
  );

  // --- legend + panel ------------------------------------------------------
  const legend = new LegendView(el<HTMLDivElement>("legend"), (label) => {
    void store.toggleLegendFilter(label);
  });
  const panel = new ConversationPanel(el<HTMLDivElement>("conversation-panel"), () => {
    scene3d.setSelected(null);
    store.collapseHost();
  });

  // --- view tabs -----------------------------------------------------------
  const tabs: Record<ViewName, HTMLElement> = {
    topology: el("tab-topology"),
    packets: el("tab-packets"),
  };
  tabs.topology.addEventListener("click", () => store.switchView("topology"));
  tabs.packets.addEventListener("click", () => store.switchView("packets"));

  // --- filter bar ------------------------------------------------------------
  el<HTMLFormElement>("filter-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    void store.applyFilter(filterInput.value);
  });

  // --- capture loading -------------------------------------------------------
  async function loadFile(file: File): Promise<void> {
    statusBar.textContent = `loading ${file.name}…`;
    const error = await store.uploadCapture(await file.arrayBuffer());
    if (error) {
      statusBar.textContent = `load failed: ${error.message}`;
    }
  }
  el<HTMLInputElement>("file-input").addEventListener("change", (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) void loadFile(file);
  });
  document.addEventListener("dragover", (ev) => {
    ev.preventDefault();
    dropOverlay.classList.add("visible");
  });
  document.addEventListener("dragleave", (ev) => {
    if (ev.target === dropOverlay) dropOverlay.classList.remove("visible");
  });
  document.addEventListener("drop", (ev) => {
    ev.preventDefault();
    dropOverlay.classList.remove("visible");
    const file = ev.dataTransfer?.files?.[0];
    if (file) void loadFile(file);
  });

  // --- store-driven rendering -------------------------------------------------
  let lastLayoutGeneration = -1;
  store.subscribe((state) => {
    tabs.topology.classList.toggle("active", state.view === "topology");
    tabs.packets.classList.toggle("active", state.view === "packets");
    canvasHost.classList.toggle("hidden", state.view !== "topology");
    packetsView.classList.toggle("hidden", state.view !== "packets");

    if (state.topology && state.generation !== lastLayoutGeneration) {
      lastLayoutGeneration = state.generation;
      const positions = layoutGraph({
        nodes: state.topology.nodes.map((n) => ({ id: n.id })),
        edges: state.topology.edges.map((e) => ({ a: e.a, b: e.b })),
      });
      scene3d.build(state.topology, positions);
      vlist.setTotal(state.totalFiltered, state.generation);
    }
    legend.render(state.legend, state.activeFilter);
    panel.render(state.conversations);

    if (state.filterError) {
      const pos = state.filterError.position;
      filterError.textContent =
        pos === undefined ? state.filterError.message : `at ${pos}: ${state.filterError.message}`;
    } else {
      filterError.textContent = "";
      if (document.activeElement !== filterInput) filterInput.value = state.filterText;
    }

    const truncated = state.truncated ? " (truncated at 100,000-packet safeguard)" : "";
    statusBar.textContent =
      state.phase === "parsing"
        ? `parsing… ${Math.round((state.progress ?? 0) * 100)}%`
        : `${state.totalFiltered} packets · ` +
          `${state.topology?.nodes.length ?? 0} hosts shown of ${state.topology?.totalHosts ?? 0} · ` +
          `source: ${state.phase === "ready" ? "ready" : state.phase}${truncated}`;
  });

  await store.init();
  resize();

  // --- render loop + generation polling ------------------------------------
  const clock = new THREE.Clock();
  function frame(): void {
    requestAnimationFrame(frame);
    if (!renderer) return;
    scene3d.animate(clock.getElapsedTime());
    const pose = orbit.pose();
    camera.position.set(pose.position.x, pose.position.y, pose.position.z);
    camera.lookAt(pose.target.x, pose.target.y, pose.target.z);
    renderer.render(scene3d.scene, camera);
  }
  frame();

  setInterval(() => {
    if (document.visibilityState !== "hidden") void store.checkForUpdates();
  }, 1500);
}

void boot();
