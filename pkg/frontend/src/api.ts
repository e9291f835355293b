// Typed client for the session API. Every response carries the generation of
// the snapshot it was computed from; callers reconcile concurrent reads on it.

export interface TopologyNode {
  id: string;
  kind: string;
  packets: number;
  bytes: number;
  protocols: string[];
}

export interface TopologyEdge {
  a: string;
  b: string;
  packets: number;
  bytes: number;
  protocols: Record<string, number>;
}

export interface LegendEntry {
  label: string;
  packets: number;
}

export interface TopologyResponse {
  generation: number;
  nodes: TopologyNode[];
  edges: TopologyEdge[];
  totalHosts: number;
  legend: LegendEntry[];
}

export interface LegendResponse {
  generation: number;
  legend: LegendEntry[];
}

export interface PacketRow {
  number: number;
  time: string;
  src: string;
  dst: string;
  protocol: string;
  length: number;
  info: string;
}

export interface PacketPage {
  generation: number;
  rows: PacketRow[];
  total_filtered: number;
}

export interface ApiError {
  kind: string;
  message: string;
  position?: number;
  magic_hex?: string;
}

export interface StatusResponse {
  generation: number;
  phase: "empty" | "parsing" | "ready";
  progress: number | null;
  packet_count: number;
  truncated_at_safeguard: boolean;
  filter: string;
  source: string;
  error: ApiError | null;
}

export interface ConversationPeer {
  peer: string;
  kind: string;
  packets: number;
  bytes: number;
  protocols: Record<string, number>;
}

export interface ConversationsResponse {
  generation: number;
  host: string;
  peers: ConversationPeer[];
  total_packets: number;
}

export interface FilterResult {
  generation: number;
  ok?: boolean;
  error?: ApiError;
}

export interface UploadResult {
  generation: number;
  accepted?: boolean;
  error?: ApiError;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private fetchImpl: FetchLike;

  constructor(private base = "", fetchImpl?: FetchLike) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(this.base + path);
    if (!resp.ok) {
      throw new Error(`GET ${path} failed: ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  topology(): Promise<TopologyResponse> {
    return this.getJson("/topology");
  }

  legend(): Promise<LegendResponse> {
    return this.getJson("/legend");
  }

  packets(offset: number, count: number): Promise<PacketPage> {
    return this.getJson(`/packets?offset=${offset}&count=${count}`);
  }

  status(): Promise<StatusResponse> {
    return this.getJson("/status");
  }

  conversations(host: string): Promise<ConversationsResponse> {
    return this.getJson(`/hosts/${encodeURIComponent(host)}/conversations`);
  }

  // 400 responses carry a structured error body; surface it, don't throw.
  async setFilter(text: string): Promise<FilterResult> {
    const resp = await this.fetchImpl(this.base + "/filter", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
    return (await resp.json()) as FilterResult;
  }

  async uploadCapture(data: Blob | ArrayBuffer): Promise<UploadResult> {
    const resp = await this.fetchImpl(this.base + "/capture", {
      method: "POST",
      body: data as BodyInit,
    });
    return (await resp.json()) as UploadResult;
  }
}
