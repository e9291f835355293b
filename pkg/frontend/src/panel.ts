// Conversation detail panel shown when a host node is expanded.

import { ConversationsResponse } from "./api.js";
import { formatBytes } from "./scene.js";

export class ConversationPanel {
  constructor(
    private root: HTMLElement,
    private onClose: () => void,
  ) {}

  render(detail: ConversationsResponse | null): void {
    this.root.textContent = "";
    if (!detail) {
      this.root.classList.add("hidden");
      return;
    }
    this.root.classList.remove("hidden");

    const header = document.createElement("div");
    header.className = "panel-header";
    const title = document.createElement("span");
    title.className = "panel-host";
    title.textContent = detail.host;
    const close = document.createElement("button");
    close.type = "button";
    close.className = "panel-close";
    close.textContent = "×";
    close.addEventListener("click", () => this.onClose());
    header.append(title, close);

    const summary = document.createElement("div");
    summary.className = "panel-summary";
    summary.textContent =
      `${detail.total_packets} packets across ${detail.peers.length} conversation` +
      (detail.peers.length === 1 ? "" : "s");

    const table = document.createElement("div");
    table.className = "panel-peers";
    for (const peer of detail.peers) {
      const row = document.createElement("div");
      row.className = "panel-peer";
      const name = document.createElement("span");
      name.className = "peer-name";
      name.textContent = peer.peer;
      const stats = document.createElement("span");
      stats.className = "peer-stats";
      const protos = Object.entries(peer.protocols)
        .map(([label, count]) => `${label}:${count}`)
        .join(" ");
      stats.textContent = `${peer.packets} pkts, ${formatBytes(peer.bytes)} (${protos})`;
      row.append(name, stats);
      table.appendChild(row);
    }

    this.root.append(header, summary, table);
  }
}
