// Clickable protocol legend: only protocols present in the current view,
// sorted by frequency. Clicking an entry filters to that protocol; clicking
// the active entry clears the filter.

import { LegendEntry } from "./api.js";
import { protocolColor } from "./colors.js";

export class LegendView {
  constructor(
    private root: HTMLElement,
    private onToggle: (label: string) => void,
  ) {}

  render(entries: LegendEntry[], activeFilter: string): void {
    this.root.textContent = "";
    for (const entry of entries) {
      const row = document.createElement("button");
      row.type = "button";
      row.className = "legend-entry" + (entry.label === activeFilter ? " active" : "");
      row.dataset.label = entry.label;

      const swatch = document.createElement("span");
      swatch.className = "legend-swatch";
      swatch.style.backgroundColor = protocolColor(entry.label);

      const label = document.createElement("span");
      label.className = "legend-label";
      label.textContent = entry.label;

      const count = document.createElement("span");
      count.className = "legend-count";
      count.textContent = String(entry.packets);

      row.append(swatch, label, count);
      row.addEventListener("click", () => this.onToggle(entry.label));
      this.root.appendChild(row);
    }
  }
}
