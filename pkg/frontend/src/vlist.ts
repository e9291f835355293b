// Virtual packet list: only the rows intersecting the viewport plus a fixed
// overscan are mounted; spacer elements keep the scrollbar representing the
// full filtered extent. Pages are fetched on demand and cached per generation.

import { PacketPage, PacketRow } from "./api.js";

export const OVERSCAN_ROWS = 20;
export const PAGE_SIZE = 100;

export interface WindowSpec {
  start: number; // first mounted row index
  end: number; // one past the last mounted row
  padTop: number; // px
  padBottom: number; // px
}

/** Mounted rows are bounded by viewportRows + 2 * overscan regardless of total. */
export function computeWindow(
  scrollTop: number,
  viewportHeight: number,
  rowHeight: number,
  total: number,
  overscan: number = OVERSCAN_ROWS,
): WindowSpec {
  const firstVisible = Math.max(0, Math.floor(scrollTop / rowHeight));
  const visibleRows = Math.ceil(viewportHeight / rowHeight);
  const start = Math.max(0, firstVisible - overscan);
  const end = Math.min(total, firstVisible + visibleRows + overscan);
  return {
    start,
    end: Math.max(start, end),
    padTop: start * rowHeight,
    padBottom: Math.max(0, (total - Math.max(start, end)) * rowHeight),
  };
}

export type PageFetcher = (offset: number, count: number) => Promise<PacketPage>;

export const COLUMNS: Array<{ key: keyof PacketRow; title: string; width: string }> = [
  { key: "number", title: "No.", width: "6ch" },
  { key: "time", title: "Time", width: "11ch" },
  { key: "src", title: "Source", width: "18ch" },
  { key: "dst", title: "Destination", width: "18ch" },
  { key: "protocol", title: "Protocol", width: "9ch" },
  { key: "length", title: "Length", width: "7ch" },
  { key: "info", title: "Info", width: "auto" },
];

export class VirtualPacketList {
  readonly rowHeight: number;
  private total = 0;
  private generation = -1;
  private pages = new Map<number, PacketRow[]>();
  private pending = new Set<number>();
  private spacerTop: HTMLElement;
  private spacerBottom: HTMLElement;
  private rowHost: HTMLElement;
  private emptyNote: HTMLElement;
  private viewportHeightOverride: number | null;

  constructor(
    private viewport: HTMLElement,
    private fetchPage: PageFetcher,
    options: { rowHeight?: number; viewportHeight?: number } = {},
  ) {
    this.rowHeight = options.rowHeight ?? 24;
    this.viewportHeightOverride = options.viewportHeight ?? null;
    this.spacerTop = document.createElement("div");
    this.rowHost = document.createElement("div");
    this.spacerBottom = document.createElement("div");
    this.emptyNote = document.createElement("div");
    this.emptyNote.className = "vlist-empty";
    this.emptyNote.textContent = "No packets match the current filter.";
    this.emptyNote.style.display = "none";
    viewport.append(this.spacerTop, this.rowHost, this.spacerBottom, this.emptyNote);
    viewport.addEventListener("scroll", () => void this.render());
  }

  private viewportHeight(): number {
    return this.viewportHeightOverride ?? this.viewport.clientHeight ?? 0;
  }

  /** New result set (new generation): drop the cache and re-render. */
  setTotal(total: number, generation: number): void {
    if (generation !== this.generation) {
      this.pages.clear();
      this.pending.clear();
      this.generation = generation;
    }
    this.total = total;
    void this.render();
  }

  mountedRowCount(): number {
    return this.rowHost.childElementCount;
  }

  window(): WindowSpec {
    return computeWindow(
      this.viewport.scrollTop || 0, this.viewportHeight(), this.rowHeight, this.total,
    );
  }

  async render(): Promise<void> {
    const spec = this.window();
    this.emptyNote.style.display = this.total === 0 ? "" : "none";
    this.spacerTop.style.height = `${spec.padTop}px`;
    this.spacerBottom.style.height = `${spec.padBottom}px`;

    const firstPage = Math.floor(spec.start / PAGE_SIZE);
    const lastPage = spec.end > spec.start ? Math.floor((spec.end - 1) / PAGE_SIZE) : firstPage;
    const fetches: Promise<void>[] = [];
    for (let page = firstPage; page <= lastPage; page++) {
      if (!this.pages.has(page) && !this.pending.has(page)) {
        fetches.push(this.loadPage(page));
      }
    }
    if (fetches.length) await Promise.all(fetches);

    this.rowHost.textContent = "";
    for (let i = spec.start; i < spec.end; i++) {
      const page = this.pages.get(Math.floor(i / PAGE_SIZE));
      const row = page?.[i % PAGE_SIZE];
      this.rowHost.appendChild(this.renderRow(row, i));
    }
  }

  private async loadPage(page: number): Promise<void> {
    this.pending.add(page);
    try {
      const result = await this.fetchPage(page * PAGE_SIZE, PAGE_SIZE);
      if (result.generation === this.generation) {
        this.pages.set(page, result.rows);
      }
    } finally {
      this.pending.delete(page);
    }
  }

  private renderRow(row: PacketRow | undefined, index: number): HTMLElement {
    const el = document.createElement("div");
    el.className = "vrow" + (index % 2 ? " odd" : "");
    el.style.height = `${this.rowHeight}px`;
    if (!row) {
      el.classList.add("loading");
      return el;
    }
    for (const col of COLUMNS) {
      const cell = document.createElement("span");
      cell.className = `vcell vcell-${String(col.key)}`;
      cell.textContent = String(row[col.key]);
      el.appendChild(cell);
    }
    return el;
  }
}
