// Client-side certificate verification: canonical JSON + detached Ed25519.
// Mirrors the platform's signing rules so a downloaded certificate file can
// be checked without trusting the checker's network connection.

import nacl from 'tweetnacl';

// Canonical form: keys sorted at every depth, no whitespace, UTF-8.
// Signed bodies contain only strings, integers, booleans, arrays, objects.
export function canonicalJson(value: unknown): string {
  if (value === null || value === undefined) {
    throw new Error('null is not allowed in signed documents');
  }
  if (typeof value === 'number') {
    if (!Number.isInteger(value)) {
      throw new Error('floats are not allowed in signed documents');
    }
    return String(value);
  }
  if (typeof value === 'boolean') {
    return value ? 'true' : 'false';
  }
  if (typeof value === 'string') {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(',')}]`;
  }
  if (typeof value === 'object') {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([key, item]) => `${JSON.stringify(key)}:${canonicalJson(item)}`);
    return `{${entries.join(',')}}`;
  }
  throw new Error(`unsupported value in signed document: ${typeof value}`);
}

function strictBase64Decode(encoded: string): Uint8Array {
  let binary: string;
  try {
    binary = atob(encoded);
  } catch {
    throw new Error('signature is not base64');
  }
  const bytes = Uint8Array.from(binary, (c) => c.charCodeAt(0));
  // round trip: lenient decoders ignore non-canonical padding bits
  if (btoa(binary) !== encoded) {
    throw new Error('signature is not canonical base64');
  }
  return bytes;
}

export function hexToBytes(hex: string): Uint8Array {
  if (!/^[0-9a-f]*$/.test(hex) || hex.length % 2 !== 0) {
    throw new Error('bad hex string');
  }
  const bytes = new Uint8Array(hex.length / 2);
  for (let i = 0; i < bytes.length; i++) {
    bytes[i] = parseInt(hex.slice(2 * i, 2 * i + 2), 16);
  }
  return bytes;
}

export interface Envelope {
  body: Record<string, unknown>;
  signature: string;
  key_id: string;
}

export function parseEnvelope(text: string): Envelope {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch {
    throw new Error('not valid JSON');
  }
  if (
    typeof parsed !== 'object' ||
    parsed === null ||
    typeof (parsed as Envelope).signature !== 'string' ||
    typeof (parsed as Envelope).key_id !== 'string' ||
    typeof (parsed as Envelope).body !== 'object'
  ) {
    throw new Error('missing body / signature / key_id');
  }
  return parsed as Envelope;
}

export function verifyEnvelope(envelope: Envelope, platformPublicKeyHex: string): boolean {
  const keyIdInBody = envelope.body['platform_key_id'];
  if (typeof keyIdInBody === 'string' && keyIdInBody !== envelope.key_id) {
    return false;
  }
  let message: Uint8Array;
  let signature: Uint8Array;
  try {
    message = new TextEncoder().encode(canonicalJson(envelope.body));
    signature = strictBase64Decode(envelope.signature);
  } catch {
    return false;
  }
  if (signature.length !== nacl.sign.signatureLength) {
    return false;
  }
  return nacl.sign.detached.verify(message, signature, hexToBytes(platformPublicKeyHex));
}
