/** Local draft persistence, keyed per (annotator, entry).
 *
 * Browsers get localStorage; tests and node inject the memory store. Losing
 * half-finished work in a 50-entry session corrupts agreement studies, so
 * every edit is saved and a failed submit leaves the draft untouched.
 */

import { WireRecord } from './types.js';

export interface DraftStore {
  load(key: string): WireRecord | null;
  save(key: string, record: WireRecord): void;
  clear(key: string): void;
}

export function draftKey(annotatorId: string, entryId: string): string {
  return `mrcaudit-draft:${annotatorId}:${entryId}`;
}

export class MemoryDraftStore implements DraftStore {
  private drafts = new Map<string, string>();

  load(key: string): WireRecord | null {
    const raw = this.drafts.get(key);
    return raw ? (JSON.parse(raw) as WireRecord) : null;
  }

  save(key: string, record: WireRecord): void {
    this.drafts.set(key, JSON.stringify(record));
  }

  clear(key: string): void {
    this.drafts.delete(key);
  }
}

export class BrowserDraftStore implements DraftStore {
  constructor(private readonly storage: Storage) {}

  load(key: string): WireRecord | null {
    const raw = this.storage.getItem(key);
    if (!raw) return null;
    try {
      return JSON.parse(raw) as WireRecord;
    } catch {
      this.storage.removeItem(key);
      return null;
    }
  }

  save(key: string, record: WireRecord): void {
    this.storage.setItem(key, JSON.stringify(record));
  }

  clear(key: string): void {
    this.storage.removeItem(key);
  }
}
