#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import logging
from typing import Any, Dict

from graphene import Schema

from .schema import Query, type_class


class AVNMPCore:
    """Read-only GraphQL surface over the analysis modules."""

    def __init__(self, logger: logging.Logger, **setting: Dict[str, Any]) -> None:
        self.logger = logger
        self.setting = setting
        self.schema = self.__class__.build_graphql_schema()

    def execute(self, schema: Schema, **params: Dict[str, Any]) -> Dict[str, Any]:
        query = params.get("query")
        if not query:
            return {"data": None, "errors": [{"message": "missing query"}]}

        result = schema.execute(
            query,
            variable_values=params.get("variables"),
            operation_name=params.get("operation_name"),
        )
        response: Dict[str, Any] = {"data": result.data}
        if result.errors:
            for error in result.errors:
                self.logger.warning(f"GraphQL error: {error}")
            response["errors"] = [{"message": str(error)} for error in result.errors]
        return response

    def avnmp_core_graphql(self, **params: Dict[str, Any]) -> Dict[str, Any]:
        try:
            return self.execute(self.schema, **params)
        except Exception:
            self.logger.exception("GraphQL execution failed")
            raise

    @staticmethod
    def build_graphql_schema() -> Schema:
        return Schema(query=Query, types=type_class())
