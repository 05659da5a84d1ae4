// Typed client for the recommendation service. Response shapes mirror the
// server payloads field for field; nothing is renamed or synthesized here.

export interface KeywordCluster {
  cluster_id: number;
  keywords: string[];
}

export interface Benchmark {
  kind: string;
  source_id: number;
  cluster: number;
}

export interface Card {
  wine_id: number;
  name: string;
  winery: string;
  country: string;
  region: string;
  vintage: number | null;
  price: number;
  score: number;
  cost: number;
  value_term: number;
  distance: number;
  distance_term: number;
  source_clusters: number[];
  benchmark: Benchmark;
}

export interface RecommendationRound {
  bets: Card[];
  wildcard: Card;
  seed: number;
  round: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let res: Response;
  try {
    res = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, "network_error", "could not reach the server");
  }
  const body = await res.json().catch(() => null);
  if (!res.ok) {
    const code = body && typeof body.code === "string" ? body.code : "http_error";
    const message =
      body && typeof body.message === "string" ? body.message : res.statusText;
    throw new ApiError(res.status, code, message);
  }
  return body as T;
}

export class ApiClient {
  constructor(private base = "") {}

  createSession(): Promise<{ session_id: string }> {
    return request(`${this.base}/api/session`, { method: "POST" });
  }

  keywords(): Promise<{ clusters: KeywordCluster[] }> {
    return request(`${this.base}/api/keywords`);
  }

  questionnaire(
    sessionId: string,
    keywords: string[],
  ): Promise<{ target_clusters: number[] }> {
    return request(`${this.base}/api/session/${sessionId}/questionnaire`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ keywords }),
    });
  }

  recommendations(sessionId: string): Promise<RecommendationRound> {
    return request(`${this.base}/api/session/${sessionId}/recommendations`);
  }

  feedback(
    sessionId: string,
    wineId: number,
    verdict: "liked" | "disliked",
  ): Promise<{ history_size: number }> {
    return request(`${this.base}/api/session/${sessionId}/feedback`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ wine_id: wineId, verdict }),
    });
  }
}
