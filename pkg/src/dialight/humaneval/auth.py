"""Password hashing and HMAC-signed JWTs for the human-evaluation service."""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import os
import time

PBKDF2_ITERATIONS = 100_000
DEFAULT_TOKEN_TTL_HOURS = 24.0


class TokenError(Exception):
    """Missing, malformed, tampered, or expired token."""


def hash_password(password: str, salt: bytes | None = None) -> str:
    salt = salt if salt is not None else os.urandom(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, PBKDF2_ITERATIONS)
    return f"pbkdf2-sha256${PBKDF2_ITERATIONS}${salt.hex()}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        _, iterations, salt_hex, digest_hex = stored.split("$")
        digest = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(salt_hex), int(iterations)
        )
        return hmac.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


def _b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _b64url_decode(data: str) -> bytes:
    padding = "=" * (-len(data) % 4)
    return base64.urlsafe_b64decode(data + padding)


class TokenSigner:
    """HS256 JWTs carrying subject, role, and expiry."""

    def __init__(self, secret: str, ttl_hours: float = DEFAULT_TOKEN_TTL_HOURS):
        if not secret:
            raise ValueError("token secret must be non-empty")
        self._secret = secret.encode("utf-8")
        self._ttl_seconds = ttl_hours * 3600.0

    def _sign(self, signing_input: bytes) -> str:
        return _b64url(hmac.new(self._secret, signing_input, hashlib.sha256).digest())

    def issue(self, subject: str, role: str, now: float | None = None) -> str:
        now = time.time() if now is None else now
        header = _b64url(json.dumps({"alg": "HS256", "typ": "JWT"}).encode("utf-8"))
        payload = _b64url(
            json.dumps(
                {"sub": subject, "role": role, "iat": int(now), "exp": int(now + self._ttl_seconds)}
            ).encode("utf-8")
        )
        signature = self._sign(f"{header}.{payload}".encode("ascii"))
        return f"{header}.{payload}.{signature}"

    def verify(self, token: str, now: float | None = None) -> dict:
        """Claims of a valid token; raises TokenError otherwise."""
        now = time.time() if now is None else now
        parts = token.split(".")
        if len(parts) != 3:
            raise TokenError("malformed token")
        header_b64, payload_b64, signature = parts
        expected = self._sign(f"{header_b64}.{payload_b64}".encode("ascii"))
        if not hmac.compare_digest(signature, expected):
            raise TokenError("invalid signature")
        try:
            claims = json.loads(_b64url_decode(payload_b64))
        except (ValueError, UnicodeDecodeError) as exc:
            raise TokenError("undecodable payload") from exc
        if not isinstance(claims, dict) or "sub" not in claims or "role" not in claims:
            raise TokenError("missing claims")
        if claims.get("exp", 0) < now:
            raise TokenError("token expired")
        return claims
