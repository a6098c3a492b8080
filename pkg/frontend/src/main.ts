/** Browser bootstrap: read connection settings and mount the app. */

import { WorkbenchClient } from './api.js';
import { AnnotatorApp } from './app.js';
import { BrowserDraftStore } from './drafts.js';

function setting(name: string, fallback: string): string {
  const fromQuery = new URLSearchParams(window.location.search).get(name);
  if (fromQuery) {
    window.localStorage.setItem(`mrcaudit-${name}`, fromQuery);
    return fromQuery;
  }
  return window.localStorage.getItem(`mrcaudit-${name}`) ?? fallback;
}

async function boot(): Promise<void> {
  const baseUrl = setting('service', window.location.origin);
  const annotatorId = setting('annotator', 'annotator-1');
  const token = setting('token', '');
  const client = new WorkbenchClient(baseUrl, token || null);
  const app = new AnnotatorApp({
    client,
    drafts: new BrowserDraftStore(window.localStorage),
    annotatorId,
  });
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app root');
  await app.mount(root);
}

void boot();
