import type { Settings } from './types.js';

const STORAGE_KEY = 'newsagent.settings';

export const DEFAULT_SETTINGS: Settings = {
  rate: 1.0,
  voice: null,
  language: 'en',
  textOnly: false,
};

export function loadSettings(storage: Storage | null = defaultStorage()): Settings {
  if (!storage) return { ...DEFAULT_SETTINGS };
  try {
    const raw = storage.getItem(STORAGE_KEY);
    if (!raw) return { ...DEFAULT_SETTINGS };
    const parsed = JSON.parse(raw) as Partial<Settings>;
    return { ...DEFAULT_SETTINGS, ...parsed };
  } catch {
    return { ...DEFAULT_SETTINGS };
  }
}

export function saveSettings(settings: Settings, storage: Storage | null = defaultStorage()): void {
  if (!storage) return;
  try {
    storage.setItem(STORAGE_KEY, JSON.stringify(settings));
  } catch {
    // storage full or blocked: settings simply stay session-local
  }
}

function defaultStorage(): Storage | null {
  return typeof window !== 'undefined' && window.localStorage ? window.localStorage : null;
}
