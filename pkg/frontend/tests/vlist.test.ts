// Virtual scrolling: the mounted-row bound (viewport rows + 40) must hold at
// benchmark scale, and the scrollbar must represent the full filtered extent.

import { describe, expect, it } from "vitest";

import type { PacketPage, PacketRow } from "../src/api.js";
import { OVERSCAN_ROWS, VirtualPacketList, computeWindow } from "../src/vlist.js";

const BENCH_TOTAL = 48_640;
const ROW_H = 24;
const VIEW_H = 600; // 25 visible rows

function syntheticRow(i: number): PacketRow {
  return {
    number: i + 1,
    time: (i * 0.001).toFixed(6),
    src: "10.2.0.1",
    dst: "10.2.0.2",
    protocol: "tcp",
    length: 60,
    info: `packet ${i + 1}`,
  };
}

function syntheticFetcher(generation = 0) {
  return async (offset: number, count: number): Promise<PacketPage> => ({
    generation,
    total_filtered: BENCH_TOTAL,
    rows: Array.from(
      { length: Math.max(0, Math.min(count, BENCH_TOTAL - offset)) },
      (_, k) => syntheticRow(offset + k),
    ),
  });
}

describe("computeWindow", () => {
  it("mounted rows never exceed viewport rows + 40 at any scroll position", () => {
    const viewportRows = Math.ceil(VIEW_H / ROW_H);
    for (let scroll = 0; scroll <= BENCH_TOTAL * ROW_H; scroll += 9973) {
      const w = computeWindow(scroll, VIEW_H, ROW_H, BENCH_TOTAL);
      expect(w.end - w.start).toBeLessThanOrEqual(viewportRows + 2 * OVERSCAN_ROWS);
      expect(w.end - w.start).toBeLessThanOrEqual(viewportRows + 40);
      expect(w.start).toBeGreaterThanOrEqual(0);
      expect(w.end).toBeLessThanOrEqual(BENCH_TOTAL);
    }
  });

  it("spacers plus mounted extent always equal the full scroll height", () => {
    for (const scroll of [0, 777, 123456, BENCH_TOTAL * ROW_H]) {
      const w = computeWindow(scroll, VIEW_H, ROW_H, BENCH_TOTAL);
      expect(w.padTop + (w.end - w.start) * ROW_H + w.padBottom).toBe(BENCH_TOTAL * ROW_H);
    }
  });

  it("small lists mount entirely", () => {
    const w = computeWindow(0, VIEW_H, ROW_H, 10);
    expect(w.start).toBe(0);
    expect(w.end).toBe(10);
    expect(w.padTop).toBe(0);
    expect(w.padBottom).toBe(0);
  });

  it("empty list mounts nothing", () => {
    const w = computeWindow(0, VIEW_H, ROW_H, 0);
    expect(w.end - w.start).toBe(0);
  });
});

describe("VirtualPacketList (DOM)", () => {
  function makeList() {
    const viewport = document.createElement("div");
    document.body.appendChild(viewport);
    const list = new VirtualPacketList(viewport, syntheticFetcher(), {
      rowHeight: ROW_H,
      viewportHeight: VIEW_H,
    });
    return { viewport, list };
  }

  it("mounts at most viewport rows + 40 elements with 48,640 packets", async () => {
    const { viewport, list } = makeList();
    list.setTotal(BENCH_TOTAL, 0);
    await list.render();
    const bound = Math.ceil(VIEW_H / ROW_H) + 40;
    expect(list.mountedRowCount()).toBeGreaterThan(0);
    expect(list.mountedRowCount()).toBeLessThanOrEqual(bound);

    for (const scroll of [50 * ROW_H, 20_000 * ROW_H, (BENCH_TOTAL - 30) * ROW_H]) {
      viewport.scrollTop = scroll;
      await list.render();
      expect(list.mountedRowCount()).toBeLessThanOrEqual(bound);
    }
  });

  it("renders real row content from fetched pages", async () => {
    const { viewport, list } = makeList();
    list.setTotal(BENCH_TOTAL, 0);
    viewport.scrollTop = 200 * ROW_H;
    await list.render();
    const first = viewport.querySelector(".vrow .vcell-number");
    expect(first).not.toBeNull();
    const n = Number(first!.textContent);
    expect(n).toBeGreaterThan(150);
    expect(n).toBeLessThan(260);
  });

  it("scroll to the bottom shows the final row number", async () => {
    const { viewport, list } = makeList();
    list.setTotal(153, 0);
    viewport.scrollTop = 153 * ROW_H - VIEW_H;
    await list.render();
    const numbers = [...viewport.querySelectorAll(".vcell-number")].map((c) =>
      Number(c.textContent),
    );
    expect(numbers[numbers.length - 1]).toBe(153);
  });

  it("scrolled to the bottom of the dns filter, the last row is the 153rd match", async () => {
    // real fixture pages captured from the engine (dns filter: 153 matches)
    const { MockServer, fixture } = await import("./mock_server.js");
    const { ApiClient } = await import("../src/api.js");
    const server = new MockServer();
    const api = new ApiClient("", server.fetch);
    await api.setFilter("dns");

    const viewport = document.createElement("div");
    document.body.appendChild(viewport);
    const list = new VirtualPacketList(viewport, (offset, count) => api.packets(offset, count), {
      rowHeight: ROW_H,
      viewportHeight: VIEW_H,
    });
    list.setTotal(153, server.generation);
    viewport.scrollTop = 153 * ROW_H - VIEW_H;
    await list.render();

    const numbers = [...viewport.querySelectorAll(".vcell-number")].map((c) =>
      Number(c.textContent),
    );
    const lastPage = fixture("packets_dns_p100.json");
    const expectedLast = lastPage.rows[lastPage.rows.length - 1].number;
    expect(numbers[numbers.length - 1]).toBe(expectedLast);
    expect(lastPage.rows).toHaveLength(53); // 100 + 53 = 153 matches
  });

  it("empty result set shows the empty-state note", async () => {
    const { viewport, list } = makeList();
    list.setTotal(0, 0);
    await list.render();
    expect(list.mountedRowCount()).toBe(0);
    const note = viewport.querySelector(".vlist-empty") as HTMLElement;
    expect(note.style.display).not.toBe("none");
  });

  it("a new generation drops the page cache", async () => {
    let calls = 0;
    const viewport = document.createElement("div");
    document.body.appendChild(viewport);
    const list = new VirtualPacketList(
      viewport,
      async (offset, count) => {
        calls += 1;
        return syntheticFetcher(calls > 1 ? 1 : 0)(offset, count);
      },
      { rowHeight: ROW_H, viewportHeight: VIEW_H },
    );
    list.setTotal(BENCH_TOTAL, 0);
    await list.render();
    const afterFirst = calls;
    list.setTotal(153, 1);
    await list.render();
    expect(calls).toBeGreaterThan(afterFirst);
  });
});
