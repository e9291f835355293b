// The app store: one client-side mirror of the shared session state.
// All views render from here; responses older than the applied generation
// are discarded so slow requests can never roll the UI backwards.

import {
  ApiClient,
  ApiError,
  ConversationsResponse,
  LegendEntry,
  TopologyResponse,
} from "./api.js";

export type ViewName = "topology" | "packets";

export interface AppState {
  view: ViewName;
  generation: number;
  topology: TopologyResponse | null;
  legend: LegendEntry[];
  filterText: string; // filter bar contents (uncommitted edits allowed)
  activeFilter: string; // last successfully applied filter
  totalFiltered: number;
  filterError: ApiError | null;
  expandedHost: string | null;
  conversations: ConversationsResponse | null;
  phase: string;
  progress: number | null;
  truncated: boolean;
  lastError: ApiError | null;
}

type Listener = (state: AppState) => void;

export class AppStore {
  readonly state: AppState = {
    view: "topology",
    generation: -1,
    topology: null,
    legend: [],
    filterText: "",
    activeFilter: "",
    totalFiltered: 0,
    filterError: null,
    expandedHost: null,
    conversations: null,
    phase: "empty",
    progress: null,
    truncated: false,
    lastError: null,
  };

  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  /** Startup: land in the topology view populated with whatever the session serves. */
  async init(): Promise<void> {
    this.state.view = "topology";
    await this.refreshAll();
  }

  /** Re-fetch all projections and apply them if they are not stale. */
  async refreshAll(): Promise<void> {
    const [status, topology, page] = await Promise.all([
      this.api.status(),
      this.api.topology(),
      this.api.packets(0, 1),
    ]);
    const generation = Math.max(status.generation, topology.generation, page.generation);
    if (generation < this.state.generation) return; // stale burst
    this.state.generation = generation;
    if (topology.generation === generation) {
      this.state.topology = topology;
      this.state.legend = topology.legend;
    }
    if (page.generation === generation) {
      this.state.totalFiltered = page.total_filtered;
    }
    this.state.phase = status.phase;
    this.state.progress = status.progress;
    this.state.truncated = status.truncated_at_safeguard;
    this.state.activeFilter = status.filter;
    this.state.filterText = status.filter;
    this.state.lastError = status.error;
    if (this.state.expandedHost !== null) {
      await this.expandHost(this.state.expandedHost, false);
    }
    this.emit();
  }

  /**
   * Submit filter text. On success every view refreshes against the new
   * generation; on a parse error only the inline error changes (no view
   * re-fetch, the displayed data stays put).
   */
  async applyFilter(text: string): Promise<boolean> {
    this.state.filterText = text;
    const result = await this.api.setFilter(text);
    if (result.error) {
      this.state.filterError = result.error;
      this.emit();
      return false;
    }
    this.state.filterError = null;
    this.state.activeFilter = text;
    if (result.generation > this.state.generation) {
      this.state.generation = result.generation;
    }
    await this.refreshAll();
    return true;
  }

  /** Legend click: filter to that protocol; clicking the active one clears. */
  async toggleLegendFilter(label: string): Promise<void> {
    const next = this.state.activeFilter === label ? "" : label;
    await this.applyFilter(next);
  }

  /** Pure view switch: cached state only, no network. */
  switchView(view: ViewName): void {
    if (this.state.view !== view) {
      this.state.view = view;
      this.emit();
    }
  }

  async expandHost(id: string, emit = true): Promise<void> {
    try {
      const detail = await this.api.conversations(id);
      if (detail.generation >= this.state.generation) {
        this.state.expandedHost = id;
        this.state.conversations = detail;
      }
    } catch {
      this.state.expandedHost = null;
      this.state.conversations = null;
    }
    if (emit) this.emit();
  }

  collapseHost(): void {
    this.state.expandedHost = null;
    this.state.conversations = null;
    this.emit();
  }

  async uploadCapture(data: Blob | ArrayBuffer): Promise<ApiError | null> {
    const result = await this.api.uploadCapture(data);
    if (result.error) {
      this.state.lastError = result.error;
      this.emit();
      return result.error;
    }
    await this.pollUntilReady();
    return null;
  }

  /** Poll status during a parse; resolves once the session is ready again. */
  async pollUntilReady(intervalMs = 150, maxAttempts = 400): Promise<void> {
    for (let i = 0; i < maxAttempts; i++) {
      const status = await this.api.status();
      this.state.phase = status.phase;
      this.state.progress = status.progress;
      this.emit();
      if (status.phase !== "parsing") break;
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
    await this.refreshAll();
  }

  /** Generation poll: cheap change detection for external mutations. */
  async checkForUpdates(): Promise<void> {
    const status = await this.api.status();
    if (status.generation !== this.state.generation || status.phase === "parsing") {
      await this.refreshAll();
    }
  }
}
