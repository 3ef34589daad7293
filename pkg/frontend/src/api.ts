// Typed client for the redress HTTP/JSON gateway. Consumes only the
// documented endpoints; money is integer minor units, timestamps RFC 3339.

export interface CaseExport {
  case_id: string;
  reporter: string;
  accused: string;
  category: string;
  narrative: string;
  evidence: string[];
  filed_at: string;
  state: string;
  escrow_ref: string | null;
  ballots: unknown[];
  outcome: { decision: string; aggregate_impact: number | null; ballots_used: number } | null;
  events: { at: string; kind: string; detail: Record<string, unknown> }[];
  certificate_id: string | null;
}

export interface AckEnvelope {
  body: {
    case_id: string;
    report_digest: string;
    received_at: string;
    platform_key_id: string;
  };
  signature: string;
  key_id: string;
}

export interface CertificateEnvelope {
  body: {
    certificate_id: string;
    case_id: string;
    abuse_type: string;
    description: string;
    occurred_at: string;
    aggregate_impact: number;
    issued_at: string;
    platform_key_id: string;
  };
  signature: string;
  key_id: string;
}

export interface FiledReport {
  case: CaseExport;
  acknowledgement: AckEnvelope;
  fee_held: number;
}

export interface ProgressView {
  case_id: string;
  state: string;
  events: { at: string; kind: string; detail: Record<string, unknown> }[];
  ballots_received: number;
  ballots_expected: number;
  deadline: string | null;
}

export interface QueueItem {
  case_id: string;
  category: string;
  redacted_narrative: string;
  redacted_evidence: string[];
  deadline: string;
}

export interface AlertItem {
  recipient: string;
  sender: string;
  linked_account: string;
  reason: string;
  created_at: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    public detail: string,
    public retryAfterSeconds?: number,
  ) {
    super(`${code}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { 'Content-Type': 'application/json' } : {}),
      },
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const retry = typeof payload.retry_after_seconds === 'number'
        ? payload.retry_after_seconds
        : undefined;
      throw new ApiError(
        response.status,
        payload.error ?? `HTTP${response.status}`,
        payload.detail ?? response.statusText,
        retry,
      );
    }
    return payload as T;
  }

  fileReport(input: {
    accused: string;
    category: string;
    narrative: string;
    evidence: string[];
  }): Promise<FiledReport> {
    return this.request('POST', '/reports', input);
  }

  getCase(caseId: string): Promise<CaseExport> {
    return this.request('GET', `/cases/${caseId}`);
  }

  getProgress(caseId: string): Promise<ProgressView> {
    return this.request('GET', `/cases/${caseId}/progress`);
  }

  submitBallot(
    caseId: string,
    ballot: { verdict: boolean; impact: number; bad_faith: boolean },
  ): Promise<{ accepted: boolean; ballots_received: number }> {
    return this.request('POST', `/cases/${caseId}/ballots`, ballot);
  }

  getQueue(): Promise<{ items: QueueItem[] }> {
    return this.request('GET', '/queue');
  }

  getCertificate(certificateId: string): Promise<CertificateEnvelope> {
    return this.request('GET', `/certificates/${certificateId}`);
  }

  verifyCertificate(certificateId: string): Promise<{ certificate_id: string; valid: boolean }> {
    return this.request('GET', `/certificates/${certificateId}/verify`);
  }

  getAlerts(recipient: string): Promise<{ alerts: AlertItem[] }> {
    return this.request('GET', `/alerts?recipient=${encodeURIComponent(recipient)}`);
  }

  trialBalance(): Promise<{ trial_balance: number }> {
    return this.request('GET', '/admin/ledger/trial-balance');
  }

  linkage(account: string): Promise<{ account: string; cluster_id: string; members: string[] }> {
    return this.request('GET', `/admin/linkage/${encodeURIComponent(account)}`);
  }
}
